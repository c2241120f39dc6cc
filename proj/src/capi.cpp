#include "dal.h"

#include <cstring>
#include <string>

#include "dal/averaging.hpp"
#include "dal/disorder.hpp"
#include "dal/experiments.hpp"
#include "dal/geometry.hpp"
#include "dal/operators.hpp"
#include "dal/spectral.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
dal_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const dal::NonDeloneError& e) {
    set_error(e.what());
    return DAL_ERR_NON_DELONE;
  } catch (const dal::SolverError& e) {
    set_error(e.what());
    return DAL_ERR_SOLVER;
  } catch (const dal::ConfigError& e) {
    set_error(e.what());
    return DAL_ERR_CONFIG;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return DAL_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(e.what());
    return DAL_ERR_INTERNAL;
  }
}

dal::Window make_window(int d, const int64_t* lo, const int64_t* hi) {
  dal::LatticePoint l = dal::LatticePoint::zero(d), h = dal::LatticePoint::zero(d);
  for (int a = 0; a < d; ++a) {
    l[a] = lo[a];
    h[a] = hi[a];
  }
  return dal::Window(l, h);
}

dal::BoxSpec make_box(int d, const int64_t* center, int64_t half_width) {
  dal::LatticePoint c = dal::LatticePoint::zero(d);
  for (int a = 0; a < d; ++a) c[a] = center[a];
  return dal::BoxSpec(c, half_width);
}

}  // namespace

struct dal_delone {
  dal::DeloneSet set;
};
struct dal_disorder {
  dal::DisorderSpec spec;
};
struct dal_operator {
  dal::SparseSymmetricOperator op;
  int dim_d;
};
struct dal_spectrum {
  dal::SpectralResult res;
};

extern "C" {

const char* dal_version(void) { return DAL_VERSION; }
const char* dal_last_error(void) { return g_last_error.c_str(); }

/* -- Geometry ------------------------------------------------------------- */

dal_status dal_delone_generate_periodic(int d, int64_t k, const int64_t* lo, const int64_t* hi,
                                        dal_delone** out) {
  return guarded([&]() {
    if (!lo || !hi || !out) throw std::invalid_argument("null argument");
    *out = new dal_delone{dal::generate_periodic(d, k, make_window(d, lo, hi))};
    return DAL_OK;
  });
}

dal_status dal_delone_generate_sturmian(int d, double alpha, double beta, const int64_t* lo,
                                        const int64_t* hi, dal_delone** out) {
  return guarded([&]() {
    if (!lo || !hi || !out) throw std::invalid_argument("null argument");
    *out = new dal_delone{dal::generate_sturmian(alpha, beta, make_window(d, lo, hi))};
    return DAL_OK;
  });
}

dal_status dal_delone_generate_random_cell(int d, int64_t R, const int64_t* lo, const int64_t* hi,
                                           uint64_t seed, dal_delone** out) {
  return guarded([&]() {
    if (!lo || !hi || !out) throw std::invalid_argument("null argument");
    *out = new dal_delone{dal::generate_random_cell(d, R, make_window(d, lo, hi), seed)};
    return DAL_OK;
  });
}

dal_status dal_delone_load_file(const char* path, dal_delone** out) {
  return guarded([&]() {
    if (!path || !out) throw std::invalid_argument("null argument");
    *out = new dal_delone{dal::load_delone_file(path)};
    return DAL_OK;
  });
}

dal_status dal_delone_save_file(const dal_delone* D, const char* path) {
  return guarded([&]() {
    if (!D || !path) throw std::invalid_argument("null argument");
    dal::save_delone_file(D->set, path);
    return DAL_OK;
  });
}

dal_status dal_delone_complement(const dal_delone* D, dal_delone** out) {
  return guarded([&]() {
    if (!D || !out) throw std::invalid_argument("null argument");
    *out = new dal_delone{dal::complement(D->set)};
    return DAL_OK;
  });
}

int dal_delone_dim(const dal_delone* D) { return D ? D->set.dim() : 0; }
int64_t dal_delone_size(const dal_delone* D) { return D ? D->set.size() : 0; }
int64_t dal_delone_declared_r(const dal_delone* D) { return D ? D->set.declared_R() : 0; }

dal_status dal_delone_compute_r(const dal_delone* D, int64_t* out_r) {
  return guarded([&]() {
    if (!D || !out_r) throw std::invalid_argument("null argument");
    *out_r = dal::compute_R(D->set);
    return DAL_OK;
  });
}

void dal_delone_free(dal_delone* D) { delete D; }

/* -- Disorder --------------------------------------------------------------- */

dal_status dal_disorder_uniform(double M, dal_disorder** out) {
  return guarded([&]() {
    if (!out) throw std::invalid_argument("null argument");
    *out = new dal_disorder{dal::DisorderSpec::uniform(M)};
    return DAL_OK;
  });
}

dal_status dal_disorder_power_tail(double M, double tau, dal_disorder** out) {
  return guarded([&]() {
    if (!out) throw std::invalid_argument("null argument");
    *out = new dal_disorder{dal::DisorderSpec::power_tail(M, tau)};
    return DAL_OK;
  });
}

dal_status dal_disorder_kumaraswamy(double M, double a, double b, dal_disorder** out) {
  return guarded([&]() {
    if (!out) throw std::invalid_argument("null argument");
    *out = new dal_disorder{dal::DisorderSpec::kumaraswamy(M, a, b)};
    return DAL_OK;
  });
}

dal_status dal_disorder_reflected(const dal_disorder* in, dal_disorder** out) {
  return guarded([&]() {
    if (!in || !out) throw std::invalid_argument("null argument");
    *out = new dal_disorder{in->spec.reflected()};
    return DAL_OK;
  });
}

double dal_disorder_mean(const dal_disorder* d) { return d ? d->spec.mean() : 0.0; }
double dal_disorder_cdf(const dal_disorder* d, double t) { return d ? d->spec.cdf(t) : 0.0; }
void dal_disorder_free(dal_disorder* d) { delete d; }

dal_status dal_check_tail_condition(const dal_disorder* reflected_law, double alpha, double tau,
                                    const double* tgrid, size_t ngrid, int d, int* holds,
                                    double* worst_margin) {
  return guarded([&]() {
    if (!reflected_law || !tgrid || !holds || !worst_margin)
      throw std::invalid_argument("null argument");
    std::vector<double> grid(tgrid, tgrid + ngrid);
    auto rep = dal::check_tail_condition(reflected_law->spec, alpha, tau, grid, d);
    *holds = rep.holds ? 1 : 0;
    *worst_margin = rep.worst_margin;
    return DAL_OK;
  });
}

/* -- Operators --------------------------------------------------------------- */

dal_status dal_assemble_laplacian(int d, const int64_t* center, int64_t half_width,
                                  dal_operator** out) {
  return guarded([&]() {
    if (!center || !out) throw std::invalid_argument("null argument");
    *out = new dal_operator{dal::assemble_laplacian(make_box(d, center, half_width)), d};
    return DAL_OK;
  });
}

dal_status dal_assemble_hamiltonian(const dal_delone* D, const int64_t* center, int64_t half_width,
                                    const dal_disorder* disorder, uint64_t master_seed,
                                    uint64_t sample_index, dal_operator** out) {
  return guarded([&]() {
    if (!D || !center || !disorder || !out) throw std::invalid_argument("null argument");
    auto box = make_box(D->set.dim(), center, half_width);
    auto sample = dal::sample_potential(D->set, box, disorder->spec, master_seed, sample_index);
    *out = new dal_operator{
        dal::assemble_hamiltonian(box, D->set, sample, disorder->spec.support_max()),
        D->set.dim()};
    return DAL_OK;
  });
}

dal_status dal_assemble_reflected(const dal_delone* D, const int64_t* center, int64_t half_width,
                                  const dal_disorder* disorder, uint64_t master_seed,
                                  uint64_t sample_index, dal_operator** out) {
  return guarded([&]() {
    if (!D || !center || !disorder || !out) throw std::invalid_argument("null argument");
    auto box = make_box(D->set.dim(), center, half_width);
    auto sample = dal::sample_potential(D->set, box, disorder->spec, master_seed, sample_index);
    *out = new dal_operator{
        dal::assemble_reflected(box, D->set, sample, disorder->spec.support_max()), D->set.dim()};
    return DAL_OK;
  });
}

int64_t dal_operator_dim(const dal_operator* H) { return H ? H->op.dimension() : 0; }

dal_status dal_operator_export_file(const dal_operator* H, const char* path) {
  return guarded([&]() {
    if (!H || !path) throw std::invalid_argument("null argument");
    dal::export_operator_file(H->op, path);
    return DAL_OK;
  });
}

void dal_operator_free(dal_operator* H) { delete H; }

/* -- Spectral --------------------------------------------------------------- */

dal_status dal_eig_full(const dal_operator* H, dal_spectrum** out) {
  return guarded([&]() {
    if (!H || !out) throw std::invalid_argument("null argument");
    *out = new dal_spectrum{dal::eig_full(H->op, false)};
    return DAL_OK;
  });
}

dal_status dal_eig_extremal(const dal_operator* H, int k, int low_side, double tol,
                            dal_spectrum** out) {
  return guarded([&]() {
    if (!H || !out) throw std::invalid_argument("null argument");
    *out = new dal_spectrum{
        dal::eig_extremal(H->op, k, low_side ? dal::Side::Low : dal::Side::High, tol)};
    return DAL_OK;
  });
}

int64_t dal_spectrum_count(const dal_spectrum* s) { return s ? s->res.count() : 0; }

dal_status dal_spectrum_values(const dal_spectrum* s, double* buf, int64_t buflen) {
  return guarded([&]() {
    if (!s || !buf) throw std::invalid_argument("null argument");
    if (buflen < s->res.count()) throw std::invalid_argument("buffer too small");
    std::memcpy(buf, s->res.eigenvalues.data(), sizeof(double) * s->res.eigenvalues.size());
    return DAL_OK;
  });
}

dal_status dal_spectrum_dist(const dal_spectrum* s, double E, double* out_dist) {
  return guarded([&]() {
    if (!s || !out_dist) throw std::invalid_argument("null argument");
    *out_dist = dal::dist_to_spectrum(s->res, E);
    return DAL_OK;
  });
}

void dal_spectrum_free(dal_spectrum* s) { delete s; }

/* -- Thresholds --------------------------------------------------------------- */

dal_status dal_compute_thresholds(int d, int64_t R, double q, double* tilde_ew, double* ew,
                                  double* c) {
  return guarded([&]() {
    if (!tilde_ew || !ew || !c) throw std::invalid_argument("null argument");
    auto t = dal::compute_thresholds(d, R, q);
    *tilde_ew = t.tilde_ew;
    *ew = t.ew;
    *c = t.c;
    return DAL_OK;
  });
}

/* -- Experiment runner --------------------------------------------------------- */

dal_status dal_run_config_file(const char* config_path, const char* command_or_null,
                               const char* const* overrides, size_t n_overrides,
                               const char* out_dir, int64_t seed, int threads, int* exit_code) {
  return guarded([&]() {
    if (!exit_code) throw std::invalid_argument("null exit_code");
    dal::ExperimentConfig cfg;
    if (config_path && std::strlen(config_path) > 0) cfg = dal::parse_config_file(config_path);
    if (command_or_null && std::strlen(command_or_null) > 0) cfg.command = command_or_null;
    std::vector<std::string> ov;
    for (size_t i = 0; i < n_overrides; ++i) ov.emplace_back(overrides[i]);
    dal::apply_overrides(cfg, ov);
    dal::RunOptions opts;
    if (out_dir && std::strlen(out_dir) > 0)
      opts.out_dir = out_dir;
    else
      opts.out_dir = cfg.get_or("output.dir", "out");
    if (seed >= 0) opts.seed_override = static_cast<std::uint64_t>(seed);
    if (threads > 0) opts.threads_override = threads;
    *exit_code = dal::run_experiment(cfg, opts);
    return DAL_OK;
  });
}

} /* extern "C" */
