#include "nvx/crossrelax.hpp"

#include "nvx/error.hpp"
#include "nvx/parallel.hpp"

#include <array>
#include <cmath>

namespace nvx {

namespace {

// Level picked by the largest |amplitude|^2 on one basis row; ties resolve
// to the lowest level index.
int dominant_row_level(const Mat& vectors, int row) {
  int best = 0;
  double w = std::norm(vectors(row, 0));
  for (int j = 1; j < vectors.cols(); ++j) {
    const double wj = std::norm(vectors(row, j));
    if (wj > w) {
      w = wj;
      best = j;
    }
  }
  return best;
}

struct SingleBasis {
  Mat h_crystal;         // U H_local U^dagger
  Mat rotated_vectors;   // U * local eigenvectors
  std::vector<int> bright;                // level per nuclear label
  std::vector<std::array<int, 2>> dark;   // {+1-like, -1-like} per label
};

SingleBasis single_basis(Orientation o, const Vec3& b_mt,
                         const PhysicalConstants& c, Isotope iso) {
  const Mat h = single_nv_hamiltonian(o, b_mt, c, iso);
  const EigenSystem es = eigensystem(h);
  const Mat u = nv_frame_operator(o, iso);

  SingleBasis sb;
  sb.h_crystal = u * h * u.adjoint();
  sb.rotated_vectors = u * es.vectors;
  const int nd = nuclear_dim(iso);
  for (int k = 0; k < nd; ++k) {
    sb.bright.push_back(dominant_row_level(es.vectors, nd + k));
    sb.dark.push_back({dominant_row_level(es.vectors, k),
                       dominant_row_level(es.vectors, 2 * nd + k)});
  }
  return sb;
}

Eigen::VectorXcd kron_vec(const Eigen::VectorXcd& a,
                          const Eigen::VectorXcd& b) {
  Eigen::VectorXcd v(a.size() * b.size());
  for (int i = 0; i < a.size(); ++i)
    v.segment(i * b.size(), b.size()) = a[i] * b;
  return v;
}

}  // namespace

double pair_depolarization(Orientation o1, Orientation o2,
                           const FieldPoint& fp, const CrossRelaxConfig& cfg,
                           const PhysicalConstants& c) {
  if (cfg.dipole_directions < 1)
    throw ValidationError("dipole direction count must be >= 1");
  if (cfg.d_dd_mhz < 0.0)
    throw ValidationError("dipolar coupling must be >= 0");
  if (cfg.d_dd_mhz == 0.0) return 0.0;  // decoupled pair keeps its state

  PhysicalConstants cc = c;
  cc.d_dd_mhz = cfg.d_dd_mhz;
  const Isotope iso = cfg.iso;
  const Vec3 b = resolve_field(fp);

  const SingleBasis sb1 = single_basis(o1, b, cc, iso);
  const SingleBasis sb2 = o2 == o1 ? sb1 : single_basis(o2, b, cc, iso);

  const int nd = nuclear_dim(iso);
  const int n = 3 * nd;
  const int nn = n * n;

  // Initial states: one NV bright (m_s = 0-like), the partner dark
  // (+-1-like), both roles, all nuclear labels.
  const int nstates = nd * nd * 2 * 2;
  Mat psi(nn, nstates);
  int col = 0;
  for (int m1 = 0; m1 < nd; ++m1)
    for (int m2 = 0; m2 < nd; ++m2)
      for (int branch = 0; branch < 2; ++branch) {
        psi.col(col++) =
            kron_vec(sb1.rotated_vectors.col(sb1.bright[m1]),
                     sb2.rotated_vectors.col(sb2.dark[m2][branch]));
        psi.col(col++) =
            kron_vec(sb1.rotated_vectors.col(sb1.dark[m1][branch]),
                     sb2.rotated_vectors.col(sb2.bright[m2]));
      }

  const Mat id = Mat::Identity(n, n);
  const Mat h_base = kron(sb1.h_crystal, id) + kron(id, sb2.h_crystal);

  const SpinMatrices S = spin_matrices(1.0);
  const Mat in = Mat::Identity(nd, nd);
  const std::array<Mat, 3> se = {kron(S.sx, in), kron(S.sy, in),
                                 kron(S.sz, in)};
  std::array<std::array<Mat, 3>, 3> pair_ops;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) pair_ops[j][k] = kron(se[j], se[k]);

  double loss_sum = 0.0;
  const auto directions = fibonacci_directions(cfg.dipole_directions);
  for (const Vec3& dir : directions) {
    Mat h = h_base;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double coef = 3.0 * dir[j] * dir[k] - (j == k ? 1.0 : 0.0);
        if (coef != 0.0) h += (cc.d_dd_mhz * coef) * pair_ops[j][k];
      }

    const EigenSystem es = eigensystem(h);
    const Mat amp = es.vectors.adjoint() * psi;

    // Degenerate groups by adjacent chaining.
    std::vector<int> group_start{0};
    for (int i = 1; i < nn; ++i)
      if (es.values[i] - es.values[i - 1] > 1e-6) group_start.push_back(i);
    group_start.push_back(nn);

    for (int s = 0; s < nstates; ++s) {
      double survival = 0.0;
      for (std::size_t g = 0; g + 1 < group_start.size(); ++g) {
        double wg = 0.0;
        for (int i = group_start[g]; i < group_start[g + 1]; ++i)
          wg += std::norm(amp(i, s));
        survival += wg * wg;
      }
      loss_sum += 1.0 - survival;
    }
  }
  return loss_sum / (static_cast<double>(nstates) * directions.size());
}

double contrast_at(const FieldPoint& fp, const CrossRelaxConfig& cfg,
                   const PhysicalConstants& c) {
  double total = 0.0;
  for (std::size_t i = 0; i < all_orientations.size(); ++i)
    for (std::size_t j = i; j < all_orientations.size(); ++j) {
      const double weight = (i == j ? 1.0 : 2.0) / 16.0;
      total += weight * pair_depolarization(all_orientations[i],
                                            all_orientations[j], fp, cfg, c);
    }
  if (cfg.scale == ContrastScale::absolute) total *= cfg.absolute_scale;
  return total;
}

void apply_contrast_scale(std::vector<double>& values,
                          const CrossRelaxConfig& cfg) {
  if (cfg.scale != ContrastScale::normalized_to_max) return;
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, v);
  if (peak <= 0.0) return;
  for (double& v : values) v /= peak;
}

ContrastMap contrast_map(const std::vector<double>& b_par_grid_mt,
                         const std::vector<double>& b_perp_grid_mt,
                         const CrossRelaxConfig& cfg,
                         const PhysicalConstants& c, int workers,
                         const Vec3& background_mt) {
  if (b_par_grid_mt.empty() || b_perp_grid_mt.empty())
    throw ValidationError("contrast map needs non-empty grids");
  ContrastMap map;
  map.b_par_grid_mt = b_par_grid_mt;
  map.b_perp_grid_mt = b_perp_grid_mt;
  const int nperp = static_cast<int>(b_perp_grid_mt.size());
  const int total = static_cast<int>(b_par_grid_mt.size()) * nperp;
  map.values.assign(total, 0.0);
  parallel_for(total, workers, [&](int idx) {
    FieldPoint fp{b_par_grid_mt[idx / nperp], b_perp_grid_mt[idx % nperp],
                  background_mt};
    map.values[idx] = contrast_at(fp, cfg, c);
  });
  apply_contrast_scale(map.values, cfg);
  return map;
}

std::vector<double> linecut(double b_par_mt,
                            const std::vector<double>& b_perp_grid_mt,
                            const CrossRelaxConfig& cfg,
                            const PhysicalConstants& c, int workers,
                            const Vec3& background_mt) {
  if (b_perp_grid_mt.empty())
    throw ValidationError("linecut needs a non-empty grid");
  std::vector<double> values(b_perp_grid_mt.size(), 0.0);
  parallel_for(static_cast<int>(values.size()), workers, [&](int i) {
    FieldPoint fp{b_par_mt, b_perp_grid_mt[i], background_mt};
    values[i] = contrast_at(fp, cfg, c);
  });
  apply_contrast_scale(values, cfg);
  return values;
}

}  // namespace nvx
