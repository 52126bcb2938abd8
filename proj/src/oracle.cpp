#include "fairgeo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "fairgeo/error.hpp"

namespace fairgeo {

namespace {

struct ChunkBest {
  double value = -1.0;
  std::uint64_t index = 0;
  std::uint64_t evaluated = 0;
  std::uint64_t feasible = 0;
};

unsigned worker_count(const OracleConfig& cfg, std::uint64_t work_items) {
  unsigned n = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(work_items, 1)));
}

/// Splits [0, n) into contiguous chunks, runs `fn(begin, end)` on each concurrently and
/// folds results in chunk order, keeping strict improvements only.
template <class Fn>
ChunkBest run_chunked(std::uint64_t n, unsigned workers, Fn fn) {
  std::vector<ChunkBest> results(workers);
  {
    std::vector<std::jthread> pool;
    const std::uint64_t step = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = std::min<std::uint64_t>(n, w * step);
      const std::uint64_t end = std::min<std::uint64_t>(n, begin + step);
      pool.emplace_back([&, w, begin, end] { results[w] = fn(begin, end); });
    }
  }
  ChunkBest total;
  for (const auto& r : results) {
    total.evaluated += r.evaluated;
    total.feasible += r.feasible;
    if (r.feasible > 0 && r.value > total.value) {
      total.value = r.value;
      total.index = r.index;
    }
  }
  return total;
}

kernels::BinaryChannelModel binary_model(const ProblemInstance& inst, const OracleConfig& cfg) {
  const Matrix& s = inst.p_s_given_x().matrix();
  const Matrix& t = inst.p_t_given_x().matrix();
  kernels::BinaryChannelModel m;
  m.px0 = inst.p_x()[0];
  m.px1 = inst.p_x()[1];
  m.s_given_x0 = s.column(0);
  m.s_given_x1 = s.column(1);
  m.t_given_x0 = t.column(0);
  m.t_given_x1 = t.column(1);
  m.p_s = inst.p_s().vector();
  m.p_t = inst.p_t().vector();
  m.eps_sq = inst.eps() * inst.eps();
  m.rate = inst.rate();
  m.measure = cfg.measure;
  m.tol = cfg.feasibility_tol;
  return m;
}

OracleResult grid_search_binary(const ProblemInstance& inst, const OracleConfig& cfg) {
  const std::size_t n = cfg.grid_resolution;
  const std::size_t points = n + 1;
  Vector values(points);
  for (std::size_t k = 0; k < points; ++k) values[k] = static_cast<double>(k) / static_cast<double>(n);
  const kernels::BinaryChannelModel model = binary_model(inst, cfg);

  const ChunkBest best = run_chunked(points, worker_count(cfg, points), [&](std::uint64_t begin, std::uint64_t end) {
    ChunkBest local;
    Vector objective(points);
    std::vector<std::uint8_t> feasible(points);
    for (std::uint64_t i = begin; i < end; ++i) {
      kernels::evaluate_row(model, values[i], values, objective, feasible);
      local.evaluated += points;
      for (std::size_t j = 0; j < points; ++j) {
        if (!feasible[j]) continue;
        ++local.feasible;
        if (objective[j] > local.value) {
          local.value = objective[j];
          local.index = i * points + j;
        }
      }
    }
    return local;
  });

  OracleResult out;
  out.evaluated_count = best.evaluated;
  out.feasible_count = best.feasible;
  const std::uint64_t ia = best.feasible > 0 ? best.index / points : 0;
  const std::uint64_t ib = best.feasible > 0 ? best.index % points : 0;
  const double a = values[ia], b = values[ib];
  out.best_channel = Channel(Matrix{{a, b}, {1.0 - a, 1.0 - b}});
  out.best_value_nats = best.feasible > 0 ? best.value : 0.0;
  out.best_value_bits = to_base(out.best_value_nats, LogBase::Bits);
  return out;
}

// Compositions of `total` into `parts` nonnegative integers, lexicographic order.
std::vector<std::vector<std::size_t>> compositions(std::size_t total, std::size_t parts) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(parts, 0);
  auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
    if (pos + 1 == parts) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (std::size_t k = 0; k <= left; ++k) {
      cur[pos] = k;
      self(self, pos + 1, left - k);
    }
  };
  rec(rec, 0, total);
  return out;
}

OracleResult grid_search_generic(const ProblemInstance& inst, const OracleConfig& cfg) {
  const std::size_t nx = inst.x_size();
  const std::size_t ny = cfg.y_cardinality;
  const auto lattice = compositions(cfg.grid_resolution, ny);
  const std::uint64_t per_column = lattice.size();

  std::uint64_t total = 1;
  for (std::size_t x = 0; x < nx; ++x) {
    if (total > cfg.max_evaluations / per_column)
      throw ValidationError("grid_search: " + std::to_string(per_column) + "^" + std::to_string(nx) +
                            " channels exceeds the evaluation budget; lower the grid resolution");
    total *= per_column;
  }

  const double scale = 1.0 / static_cast<double>(cfg.grid_resolution);
  auto channel_at = [&](std::uint64_t flat) {
    Matrix m(ny, nx);
    for (std::size_t x = nx; x-- > 0;) {
      const auto& col = lattice[flat % per_column];
      flat /= per_column;
      for (std::size_t y = 0; y < ny; ++y) m(y, x) = static_cast<double>(col[y]) * scale;
    }
    return Channel(std::move(m));
  };

  const ChunkBest best = run_chunked(total, worker_count(cfg, total), [&](std::uint64_t begin, std::uint64_t end) {
    ChunkBest local;
    for (std::uint64_t i = begin; i < end; ++i) {
      const ChannelEvaluation ev = evaluate_channel(inst, channel_at(i), cfg.measure, cfg.feasibility_tol);
      ++local.evaluated;
      if (!ev.feasible) continue;
      ++local.feasible;
      if (ev.objective_nats > local.value) {
        local.value = ev.objective_nats;
        local.index = i;
      }
    }
    return local;
  });

  OracleResult out;
  out.evaluated_count = best.evaluated;
  out.feasible_count = best.feasible;
  out.best_channel = channel_at(best.feasible > 0 ? best.index : 0);
  out.best_value_nats = best.feasible > 0 ? best.value : 0.0;
  out.best_value_bits = to_base(out.best_value_nats, LogBase::Bits);
  return out;
}

Vector normalized(Vector v) {
  const double n = norm(v);
  for (double& x : v) x /= n;
  return v;
}

}  // namespace

const char* measure_name(FairnessMeasure m) noexcept {
  return m == FairnessMeasure::ChiSquaredPointwise ? "chi2" : "mi";
}

void validate(const OracleConfig& cfg) {
  if (cfg.grid_resolution < 2) throw ValidationError("oracle: grid_resolution must be >= 2");
  if (cfg.y_cardinality < 2) throw ValidationError("oracle: y_cardinality must be >= 2");
  if (!(cfg.feasibility_tol >= 0.0)) throw ValidationError("oracle: feasibility tolerance must be >= 0");
}

ChannelEvaluation evaluate_channel(const ProblemInstance& inst, const Channel& p_y_given_x,
                                   FairnessMeasure measure, double tol) {
  if (p_y_given_x.in_size() != inst.x_size())
    throw DimensionError("evaluate_channel: channel input size differs from |X|");
  const std::size_t ny = p_y_given_x.out_size();
  const Matrix joint_xy = joint_of(inst.p_x(), p_y_given_x);

  // P(s, y) and P(t, y) through the Markov chains S - X - Y and T - X - Y.
  const Matrix joint_sy = inst.p_s_given_x().matrix() * joint_xy;
  const Matrix joint_ty = inst.p_t_given_x().matrix() * joint_xy;

  ChannelEvaluation ev;
  ev.p_y.assign(ny, 0.0);
  for (std::size_t x = 0; x < joint_xy.rows(); ++x)
    for (std::size_t y = 0; y < ny; ++y) ev.p_y[y] += joint_xy(x, y);

  ev.objective_nats = mutual_information(joint_ty, LogBase::Nats);
  ev.mi_xy_nats = mutual_information(joint_xy, LogBase::Nats);
  ev.mi_sy_nats = mutual_information(joint_sy, LogBase::Nats);

  const double eps_sq = inst.eps() * inst.eps();
  bool fair = true;
  for (std::size_t y = 0; y < ny; ++y) {
    if (ev.p_y[y] <= 0.0) continue;
    Vector s_given_y = joint_sy.column(y);
    for (double& v : s_given_y) v /= ev.p_y[y];
    const double chi2 = chi_squared(s_given_y, inst.p_s().probs());
    ev.max_chi2 = std::max(ev.max_chi2, chi2);
  }
  if (measure == FairnessMeasure::ChiSquaredPointwise)
    fair = ev.max_chi2 <= eps_sq + tol;
  else
    fair = ev.mi_sy_nats <= eps_sq + tol;
  ev.feasible = fair && ev.mi_xy_nats <= inst.rate() + tol;
  return ev;
}

OracleResult grid_search(const ProblemInstance& inst, const OracleConfig& cfg) {
  validate(cfg);
  if (inst.x_size() == 2 && cfg.y_cardinality == 2) return grid_search_binary(inst, cfg);
  return grid_search_generic(inst, cfg);
}

double quadratic_oracle(const GeometryOperators& ops, double eps, double rate, std::size_t sphere_samples) {
  const std::size_t ns = ops.sqrt_p_s.size();
  if (ns < 2 || ns > 4) throw DomainError("quadratic_oracle: supports 2 <= |S| <= 4");

  // Orthonormal basis of the complement of sqrt(P_S), by Gram-Schmidt on e_1..e_n.
  std::vector<Vector> basis{normalized(ops.sqrt_p_s)};
  for (std::size_t i = 0; i < ns && basis.size() < ns; ++i) {
    Vector e(ns, 0.0);
    e[i] = 1.0;
    for (const auto& q : basis) e = axpy(e, -dot(e, q), q);
    if (norm(e) > 1e-8) basis.push_back(normalized(std::move(e)));
  }
  basis.erase(basis.begin());
  const std::size_t dim = basis.size();

  const double half_eps_sq = 0.5 * eps * eps;
  auto value_along = [&](const Vector& u) {
    const double gx = squared_norm(ops.w_xy * u);
    const double gt = squared_norm(ops.w_ty * u);
    double c_sq = 1.0;
    const double usage = half_eps_sq * gx;
    if (usage > rate) c_sq = rate / usage;
    return half_eps_sq * c_sq * gt;
  };
  auto combine = [&](std::span<const double> coeffs) {
    Vector u(ns, 0.0);
    for (std::size_t k = 0; k < dim; ++k) u = axpy(u, coeffs[k], basis[k]);
    return normalized(std::move(u));
  };

  double best = 0.0;
  if (dim == 1) {
    best = std::max(best, value_along(basis[0]));
  } else if (dim == 2) {
    const std::size_t samples = std::max<std::size_t>(sphere_samples, 1);
    for (std::size_t k = 0; k < samples; ++k) {
      const double theta = std::numbers::pi * static_cast<double>(k) / static_cast<double>(samples);
      const double c[2] = {std::cos(theta), std::sin(theta)};
      best = std::max(best, value_along(combine(c)));
    }
  } else {
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> gauss;
    Vector c(dim);
    for (std::size_t k = 0; k < sphere_samples; ++k) {
      for (double& v : c) v = gauss(rng);
      if (norm(c) < 1e-12) continue;
      best = std::max(best, value_along(combine(c)));
    }
  }
  return best;
}

}  // namespace fairgeo
