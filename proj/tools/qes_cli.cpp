// Command-line front end: builds the banded systems, runs the direct and
// perturbative solvers, and verifies solution files.  All numerical work
// goes through the C interface of the shared library; this file only
// handles flags and serialization.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qes.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct ModelFlags {
  int q = 0;
  int N = 0;
  double parity = 0.0;
  std::string f_list;
  std::string g_list;
};

struct Failure {
  int exit_code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
  throw Failure{code, message};
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      values.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(kExitUsage, std::string(flag) + ": cannot parse '" + item + "' as a number");
    }
  }
  if (values.empty()) fail(kExitUsage, std::string(flag) + ": empty list");
  return values;
}

int status_exit_code(qes_status status) {
  switch (status) {
    case QES_OK:
      return kExitOk;
    case QES_INVALID_ARGUMENT:
    case QES_DOMAIN_ERROR:
    case QES_BAD_JSON:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

void check(qes_status status) {
  if (status != QES_OK)
    fail(status_exit_code(status),
         std::string(qes_status_name(status)) + ": " + qes_last_error());
}

// RAII wrappers over the C handles.
struct Model {
  qes_model* handle = nullptr;
  ~Model() { qes_model_destroy(handle); }
};

std::string take_string(char* s) {
  std::string out = s ? s : "";
  qes_string_free(s);
  return out;
}

void make_model(const ModelFlags& flags, double parity_override, bool has_override,
                Model& model) {
  const double p = has_override ? parity_override : flags.parity;
  if (!flags.f_list.empty() && !flags.g_list.empty())
    fail(kExitUsage, "--f and --g are mutually exclusive");
  if (flags.f_list.empty() && flags.g_list.empty())
    fail(kExitUsage, "one of --f or --g is required");

  qes_status status;
  if (!flags.f_list.empty()) {
    const std::vector<double> f = parse_list(flags.f_list, "--f");
    if (static_cast<int>(f.size()) != flags.q + 1)
      fail(kExitUsage, "--f expects q+1 values f_0..f_q");
    status = qes_model_create(flags.q, flags.N, p, f.data(),
                              static_cast<int>(f.size()), &model.handle);
  } else {
    const std::vector<double> g = parse_list(flags.g_list, "--g");
    if (static_cast<int>(g.size()) != flags.q + 1)
      fail(kExitUsage, "--g expects the q+1 dominant couplings");
    status = qes_model_create_from_couplings(flags.q, flags.N, p, g.data(),
                                             static_cast<int>(g.size()), &model.handle);
  }
  check(status);
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MAGYARI_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      fail(kExitUsage, "MAGYARI_SEED is not a valid unsigned integer");
    }
  }
  return 0;
}

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
  cmd->add_option("--q", flags.q, "number of plet components q >= 0");
  cmd->add_option("--N", flags.N, "truncation degree N >= 0");
  cmd->add_option("--parity", flags.parity,
                  "channel parameter p (0 or 1; any real for large-ell use)");
  cmd->add_option("--f", flags.f_list, "comma list of tail coefficients f_0..f_q");
  cmd->add_option("--g", flags.g_list,
                  "comma list of dominant couplings g_{q+1}..g_{2q+1}");
}

std::string solutions_to_csv(const json& report) {
  std::ostringstream os;
  os.precision(17);
  os << "index,energy,residual_norm,classification,plet,wave\n";
  int index = 0;
  for (const json& s : report.at("solutions")) {
    os << index++ << ',' << s.at("energy").get<double>() << ','
       << s.at("residual_norm").get<double>() << ','
       << s.at("classification").get<std::string>() << ',';
    os << '"';
    const auto plet = s.at("plet").get<std::vector<double>>();
    for (size_t i = 0; i < plet.size(); ++i) os << (i ? ";" : "") << plet[i];
    os << "\",\"";
    const auto wave = s.at("wave").get<std::vector<double>>();
    for (size_t i = 0; i < wave.size(); ++i) os << (i ? ";" : "") << wave[i];
    os << "\"\n";
  }
  return os.str();
}

int run_build_matrix(const ModelFlags& flags) {
  Model model;
  make_model(flags, 0.0, false, model);
  char* out = nullptr;
  check(qes_model_describe_json(model.handle, &out));
  std::cout << take_string(out);
  return kExitOk;
}

int run_solve(const ModelFlags& flags, const std::string& method, int starts,
              std::uint64_t seed, const std::string& format) {
  if (format != "json" && format != "csv")
    fail(kExitUsage, "--format must be json or csv");
  Model model;
  make_model(flags, 0.0, false, model);
  json options = {{"method", method}, {"starts", starts}, {"seed", seed}};
  char* out = nullptr;
  check(qes_solve_json(model.handle, options.dump().c_str(), &out));
  const std::string report = take_string(out);
  if (format == "json")
    std::cout << report;
  else
    std::cout << solutions_to_csv(json::parse(report));
  return kExitOk;
}

int run_perturb(const ModelFlags& flags, const std::string& scheme, double p,
                bool has_p, int order, double shift_c, bool compare,
                std::optional<double> f0, std::optional<double> f1, int starts,
                std::uint64_t seed) {
  ModelFlags effective = flags;
  if (scheme == "decadic") {
    if (!effective.f_list.empty() || !effective.g_list.empty())
      fail(kExitUsage, "decadic scheme takes --f0/--f1, not --f/--g");
    std::ostringstream os;
    os.precision(17);
    os << f0.value_or(0.0) << ',' << f1.value_or(0.0) << ",1";
    effective.q = 2;
    effective.N = 2;
    effective.f_list = os.str();
  } else if (f0 || f1) {
    fail(kExitUsage, "--f0/--f1 apply to the decadic scheme only");
  }
  if (!has_p && scheme == "decadic") fail(kExitUsage, "--p is required for the decadic scheme");

  Model model;
  make_model(effective, p, has_p, model);
  json options = {{"scheme", scheme}, {"order", order},   {"shift_c", shift_c},
                  {"compare", compare}, {"starts", starts}, {"seed", seed}};
  char* out = nullptr;
  check(qes_perturb_json(model.handle, options.dump().c_str(), &out));
  std::cout << take_string(out);
  return kExitOk;
}

int run_verify(const ModelFlags& flags, const std::string& input, double tol) {
  std::string text;
  if (input.empty() || input == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    text = os.str();
  } else {
    std::ifstream in(input);
    if (!in) fail(kExitUsage, "cannot open '" + input + "'");
    std::ostringstream os;
    os << in.rdbuf();
    text = os.str();
  }

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(kExitUsage, std::string("malformed JSON: ") + e.what());
  }
  std::vector<json> solutions;
  if (doc.is_object() && doc.contains("solutions"))
    for (const json& s : doc.at("solutions")) solutions.push_back(s);
  else
    solutions.push_back(doc);

  Model model;
  make_model(flags, 0.0, false, model);

  json report = json::array();
  bool all_passed = true;
  for (const json& s : solutions) {
    char* out = nullptr;
    const qes_status status =
        qes_verify_json(model.handle, s.dump().c_str(), tol, &out);
    if (status != QES_OK && status != QES_VERIFY_FAILED) {
      qes_string_free(out);
      check(status);
    }
    report.push_back(json::parse(take_string(out)));
    all_passed = all_passed && (status == QES_OK);
  }
  std::cout << json{{"results", report}, {"passed", all_passed}}.dump(2) << "\n";
  return all_passed ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-exact polynomial oscillator toolkit"};
  app.require_subcommand(1);

  ModelFlags build_flags, solve_flags, perturb_flags, verify_flags;

  CLI::App* build = app.add_subcommand("build-matrix",
                                       "print the banded system, shift basis and g_q");
  add_model_flags(build, build_flags);

  CLI::App* solve = app.add_subcommand("solve", "solve the coupled eigenproblem");
  add_model_flags(solve, solve_flags);
  std::string method = "auto";
  int solve_starts = 64;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string format = "json";
  solve->add_option("--method", method, "auto|harmonic|sextic|n0|newton");
  solve->add_option("--starts", solve_starts, "Newton multistart count");
  solve->add_option("--seed", seed, "Newton start seed (fallback: MAGYARI_SEED)")
      ->each([&](const std::string&) { seed_given = true; });
  solve->add_option("--format", format, "json|csv");

  CLI::App* perturb = app.add_subcommand("perturb", "large-ell perturbation series");
  add_model_flags(perturb, perturb_flags);
  std::string scheme = "linear";
  double p_value = 0.0;
  int order = 1;
  double shift_c = 0.0;
  bool compare = false;
  std::optional<double> f0_opt, f1_opt;
  int perturb_starts = 96;
  std::uint64_t perturb_seed = 1;
  bool perturb_seed_given = false;
  perturb->add_option("--scheme", scheme, "linear|decadic");
  CLI::Option* p_opt = perturb->add_option("--p", p_value, "channel parameter p");
  perturb->add_option("--order", order, "truncation order K >= 0");
  perturb->add_option("--shift-c", shift_c, "linear scheme shift c in 1/(2p+c)");
  perturb->add_flag("--compare", compare, "cross-check against Newton solves");
  double f0_val = 0.0, f1_val = 0.0;
  perturb->add_option("--f0", f0_val, "decadic tail coefficient f_0")
      ->each([&](const std::string&) { f0_opt = f0_val; });
  perturb->add_option("--f1", f1_val, "decadic tail coefficient f_1")
      ->each([&](const std::string&) { f1_opt = f1_val; });
  perturb->add_option("--starts", perturb_starts, "Newton multistart count");
  perturb->add_option("--seed", perturb_seed, "seed (fallback: MAGYARI_SEED)")
      ->each([&](const std::string&) { perturb_seed_given = true; });

  CLI::App* verify = app.add_subcommand("verify", "check a solution file");
  add_model_flags(verify, verify_flags);
  std::string input;
  double tol = 1e-9;
  verify->add_option("--input", input, "solution JSON file ('-' or empty: stdin)");
  verify->add_option("--tol", tol, "acceptance threshold for both residuals");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (build->parsed()) return run_build_matrix(build_flags);
    if (solve->parsed()) {
      if (!seed_given) seed = default_seed();
      return run_solve(solve_flags, method, solve_starts, seed, format);
    }
    if (perturb->parsed()) {
      if (!perturb_seed_given) perturb_seed = default_seed() ? default_seed() : 1;
      // value of --f0/--f1 recorded via callbacks above
      return run_perturb(perturb_flags, scheme, p_value, p_opt->count() > 0, order,
                         shift_c, compare, f0_opt, f1_opt, perturb_starts,
                         perturb_seed);
    }
    if (verify->parsed()) return run_verify(verify_flags, input, tol);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
