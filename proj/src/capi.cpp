#include "qes.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <string>

#include "qes/json_io.hpp"
#include "qes/oscillator.hpp"
#include "qes/verify.hpp"

struct qes_model {
  qes::QuasiExactModel model;
  qes::MagyariSystem system;
};

namespace {

thread_local std::string g_last_error;

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

qes_status fail(qes_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
qes_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const qes::degeneracy_error& e) {
    return fail(QES_DEGENERATE, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(QES_BAD_JSON, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(QES_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(QES_DOMAIN_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(QES_INTERNAL, e.what());
  }
}

qes::json parse_options(const char* options_json) {
  if (options_json == nullptr || options_json[0] == '\0') return qes::json::object();
  qes::json j = qes::json::parse(options_json);
  if (!j.is_object()) throw std::invalid_argument("options must be a JSON object");
  return j;
}

qes::json meta_json(const qes::QuasiExactModel& model) {
  qes::json meta;
  meta["q"] = model.q();
  meta["N"] = model.N;
  meta["p"] = model.channel.p;
  meta["f"] = model.tail.f;
  return meta;
}

qes_status make_handle(int q, int n, double p, qes::WkbTail tail, qes_model** out) {
  if (out == nullptr) return fail(QES_INVALID_ARGUMENT, "null output pointer");
  *out = nullptr;
  if (q < 0 || n < 0) return fail(QES_INVALID_ARGUMENT, "q and N must be non-negative");
  return guarded([&]() {
    auto handle = std::make_unique<qes_model>();
    handle->model = qes::make_model(tail, n, qes::ParityChannel{p});
    handle->system = qes::build_system(handle->model);
    *out = handle.release();
    return QES_OK;
  });
}

qes::SolutionSet dispatch_solve(const qes_model& m, const std::string& method,
                                const qes::NewtonOptions& options, std::string& used) {
  const qes::QuasiExactModel& model = m.model;
  const int q = model.q();
  auto unsupported = [&](const char* why) {
    throw std::invalid_argument("method '" + method + "' not applicable: " + why);
  };

  std::string choice = method;
  if (choice == "auto") {
    if (q == 0)
      choice = "harmonic";
    else if (model.N == 0)
      choice = "n0";
    else if (q == 1 && model.tail.f[1] == 1.0)
      choice = "sextic";
    else
      choice = "newton";
  }
  used = choice;

  qes::SolutionSet out;
  if (choice == "harmonic") {
    if (q != 0) unsupported("requires q = 0");
    out.solutions.push_back(qes::solve_harmonic(model.tail.f[0], model.channel.p, model.N));
  } else if (choice == "sextic") {
    if (q != 1 || model.tail.f[1] != 1.0) unsupported("requires q = 1 with f_1 = 1");
    out = qes::solve_sextic(model.tail.f[0], model.N, model.channel.p);
  } else if (choice == "n0") {
    if (model.N != 0) unsupported("requires N = 0");
    out.solutions.push_back(qes::solve_n0(model.tail, model.channel.p));
  } else if (choice == "newton") {
    out = qes::solve_newton(m.system, options);
  } else {
    throw std::invalid_argument("unknown method '" + method + "'");
  }
  return out;
}

qes::json plet_wave_json(const qes::EigenPlet& plet, const std::vector<double>& wave) {
  qes::json j;
  j["plet"] = plet.g;
  j["wave"] = wave;
  return j;
}

}  // namespace

extern "C" {

qes_status qes_model_create(int q, int n, double p, const double* f, int len,
                            qes_model** out) {
  if (f == nullptr || len != q + 1)
    return fail(QES_INVALID_ARGUMENT, "expected q+1 tail coefficients");
  qes::WkbTail tail{q, std::vector<double>(f, f + len)};
  return make_handle(q, n, p, std::move(tail), out);
}

qes_status qes_model_create_from_couplings(int q, int n, double p, const double* g,
                                           int len, qes_model** out) {
  if (g == nullptr || len != q + 1)
    return fail(QES_INVALID_ARGUMENT, "expected the q+1 dominant couplings");
  if (out == nullptr) return fail(QES_INVALID_ARGUMENT, "null output pointer");
  *out = nullptr;
  return guarded([&]() {
    qes::PotentialSpec spec{q, std::vector<double>(2 * q + 1, 0.0)};
    for (int i = 0; i <= q; ++i) spec.couplings[q + i] = g[i];
    qes::WkbTail tail = qes::solve_wkb_tail(spec);
    return make_handle(q, n, p, std::move(tail), out);
  });
}

void qes_model_destroy(qes_model* model) { delete model; }

qes_status qes_model_describe_json(const qes_model* model, char** out_json) {
  if (model == nullptr || out_json == nullptr)
    return fail(QES_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    qes::json j;
    j["meta"] = meta_json(model->model);
    j["g_q"] = model->model.g_q;
    j["matrix"] = qes::matrix_to_json(model->system.H);
    qes::json diagonals = qes::json::array();
    for (const auto& J : model->system.shifts.J) {
      qes::json entries = qes::json::array();
      for (int mcol = 0; mcol <= model->model.N; ++mcol)
        for (int nrow = 0; nrow < model->system.shifts.rows(); ++nrow)
          if (J(nrow, mcol) != 0.0) entries.push_back({nrow, mcol});
      diagonals.push_back(entries);
    }
    j["shift_diagonals"] = diagonals;
    *out_json = copy_string(qes::dump(j));
    return QES_OK;
  });
}

qes_status qes_solve_json(const qes_model* model, const char* options_json,
                          char** out_json) {
  if (model == nullptr || out_json == nullptr)
    return fail(QES_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    qes::json opts = parse_options(options_json);
    const std::string method = opts.value("method", "auto");
    qes::NewtonOptions newton;
    newton.starts = opts.value("starts", newton.starts);
    newton.seed = opts.value("seed", newton.seed);
    if (newton.starts < 1) throw std::invalid_argument("starts must be >= 1");

    std::string used;
    qes::SolutionSet set = dispatch_solve(*model, method, newton, used);

    qes::json j;
    j["meta"] = meta_json(model->model);
    j["method"] = used;
    qes::json solutions = qes::json::array();
    for (const qes::QesSolution& s : set.solutions) solutions.push_back(qes::to_json(s));
    j["solutions"] = solutions;
    if (!set.diagnostic.empty()) j["diagnostic"] = set.diagnostic;
    *out_json = copy_string(qes::dump(j));
    return QES_OK;
  });
}

qes_status qes_perturb_json(const qes_model* model, const char* options_json,
                            char** out_json) {
  if (model == nullptr || out_json == nullptr)
    return fail(QES_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    qes::json opts = parse_options(options_json);
    const std::string scheme = opts.value("scheme", "linear");
    const int order = opts.value("order", 1);
    const double shift_c = opts.value("shift_c", 0.0);
    const bool compare = opts.value("compare", false);
    const int starts = opts.value("starts", 96);
    const std::uint64_t seed = opts.value("seed", std::uint64_t{1});
    if (order < 0) throw std::invalid_argument("order must be >= 0");

    const qes::QuasiExactModel& m = model->model;
    qes::LargePExpansion expansion;
    if (scheme == "linear") {
      expansion = qes::split_linear_p(model->system, m.channel.p, shift_c);
    } else if (scheme == "decadic") {
      if (m.q() != 2 || m.N != 2 || m.tail.f[2] != 1.0)
        throw std::invalid_argument(
            "decadic scheme requires q = N = 2 with unit leading tail coefficient");
      expansion = qes::rescale_decadic(m.tail.f[0], m.tail.f[1], m.channel.p);
    } else {
      throw std::invalid_argument("unknown scheme '" + scheme + "'");
    }

    std::vector<qes::ZeroOrderSolution> states =
        qes::solve_zero_order(expansion.stack, starts, seed);

    qes::json j;
    j["meta"] = meta_json(m);
    j["meta"]["scheme"] = scheme;
    j["meta"]["sigma"] = expansion.sigma;
    j["order"] = order;

    qes::json states_json = qes::json::array();
    for (const qes::ZeroOrderSolution& z : states) {
      qes::json state = plet_wave_json(z.plet0, z.wave0.h);
      qes::json entry;
      entry["zero_order"] = state;

      qes::CorrectionSeries series;
      if (order >= 1) series = qes::run(expansion.stack, z, order);
      qes::json corrections = qes::json::array();
      for (const qes::CorrectionOrder& c : series.orders)
        corrections.push_back(plet_wave_json(c.plet, qes::from_eigen(c.wave)));
      entry["corrections"] = corrections;

      auto [plet_eval, wave_eval] = qes::evaluate_series(series, z, expansion.sigma);
      entry["evaluated_plet"] = plet_eval.g;
      entry["evaluated_wave"] = wave_eval.h;

      auto [plet_phys, wave_phys] = qes::recover_physical(expansion, plet_eval, wave_eval);
      entry["recovered"] = plet_wave_json(plet_phys, wave_phys.h);
      entry["recovered"]["energy"] = plet_phys.energy();

      if (compare) {
        qes::NewtonOptions newton;
        newton.starts = starts;
        newton.seed = seed;
        qes::SolutionSet roots = qes::solve_newton(
            expansion.stack.assemble(expansion.sigma), expansion.stack.shifts, newton);
        double best = -1.0;
        for (const qes::QesSolution& s : roots.solutions) {
          double err = 0.0;
          for (int c = 0; c < plet_eval.q(); ++c)
            err = std::max(err, std::abs(s.plet.g[c] - plet_eval.g[c]));
          if (best < 0.0 || err < best) best = err;
        }
        qes::json cmp;
        cmp["error"] = best;
        cmp["sigma_power_ratio"] =
            best >= 0.0 ? best / std::pow(expansion.sigma, order + 1) : -1.0;
        const std::vector<double> sigmas = {0.2, 0.1, 0.05};
        qes::json slopes = qes::json::array();
        for (const qes::ConvergenceRow& row :
             qes::convergence_report(expansion.stack, z, order, sigmas, starts, seed))
          slopes.push_back({{"K", row.K}, {"slope", row.slope}});
        cmp["slopes"] = slopes;
        entry["comparison_to_newton"] = cmp;
      }
      states_json.push_back(std::move(entry));
    }
    j["states"] = states_json;
    *out_json = copy_string(qes::dump(j));
    return QES_OK;
  });
}

qes_status qes_verify_json(const qes_model* model, const char* solution_json,
                           double tol, char** out_json) {
  if (model == nullptr || solution_json == nullptr || out_json == nullptr)
    return fail(QES_INVALID_ARGUMENT, "null argument");
  if (!(tol > 0.0)) return fail(QES_INVALID_ARGUMENT, "tol must be positive");
  return guarded([&]() {
    qes::QesSolution s = qes::solution_from_json(qes::json::parse(solution_json));
    const qes::QuasiExactModel& m = model->model;
    if (s.plet.q() != m.q())
      throw std::invalid_argument("solution plet length does not match the model's q");
    if (s.wave.N() != m.N)
      throw std::invalid_argument("solution wave length does not match the model's N");

    const double rec =
        qes::recurrence_residual(m, s.plet, s.wave).cwiseAbs().maxCoeff();
    const auto pts = qes::default_sample_points(m, s.plet);
    const double ode = qes::ode_residual(m, s.plet, s.wave, pts);
    const bool passed = rec <= tol && ode <= tol;

    qes::json j;
    j["recurrence_residual"] = rec;
    j["equation_residual"] = ode;
    j["tol"] = tol;
    j["passed"] = passed;
    *out_json = copy_string(qes::dump(j));
    if (!passed) {
      g_last_error = "verification residuals above tolerance";
      return QES_VERIFY_FAILED;
    }
    return QES_OK;
  });
}

void qes_string_free(char* s) { delete[] s; }

const char* qes_status_name(qes_status status) {
  switch (status) {
    case QES_OK: return "ok";
    case QES_INVALID_ARGUMENT: return "invalid_argument";
    case QES_DOMAIN_ERROR: return "domain_error";
    case QES_DEGENERATE: return "degenerate";
    case QES_NO_CONVERGENCE: return "no_convergence";
    case QES_BAD_JSON: return "bad_json";
    case QES_VERIFY_FAILED: return "verify_failed";
    case QES_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* qes_last_error(void) { return g_last_error.c_str(); }

}  // extern "C"
