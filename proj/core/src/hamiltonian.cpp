#include "nvx/hamiltonian.hpp"

#include "nvx/error.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <numbers>

namespace nvx {

namespace {

constexpr Cplx kI{0.0, 1.0};

}  // namespace

const char* name(Isotope iso) {
  switch (iso) {
    case Isotope::n14: return "N14";
    case Isotope::n15: return "N15";
    case Isotope::none: return "none";
  }
  return "?";
}

Isotope isotope_from_name(const std::string& s) {
  if (s == "N14") return Isotope::n14;
  if (s == "N15") return Isotope::n15;
  if (s == "none") return Isotope::none;
  throw ValidationError("unknown isotope '" + s + "'");
}

int nuclear_dim(Isotope iso) {
  switch (iso) {
    case Isotope::n14: return 3;
    case Isotope::n15: return 2;
    case Isotope::none: return 1;
  }
  return 1;
}

double nuclear_spin(Isotope iso) {
  switch (iso) {
    case Isotope::n14: return 1.0;
    case Isotope::n15: return 0.5;
    case Isotope::none: return 0.0;
  }
  return 0.0;
}

PhysicalConstants default_constants(Isotope iso) {
  PhysicalConstants c;
  switch (iso) {
    case Isotope::n14:
      c.a_par_mhz = -2.14;
      c.a_perp_mhz = -2.70;
      c.q_mhz = -4.96;
      break;
    case Isotope::n15:
      c.a_par_mhz = 3.03;
      c.a_perp_mhz = 3.65;
      c.q_mhz = 0.0;
      break;
    case Isotope::none:
      break;
  }
  return c;
}

SpinMatrices spin_matrices(double s) {
  if (s != 0.5 && s != 1.0)
    throw ValidationError("unsupported spin " + std::to_string(s));
  const int dim = static_cast<int>(std::lround(2.0 * s)) + 1;
  Mat sp = Mat::Zero(dim, dim);  // raising operator
  Mat sz = Mat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const double m = s - k;  // basis ordered m = +s .. -s
    sz(k, k) = m;
    if (k + 1 < dim) {
      const double mlow = m - 1.0;
      sp(k, k + 1) = std::sqrt(s * (s + 1.0) - mlow * (mlow + 1.0));
    }
  }
  SpinMatrices out;
  out.sx = 0.5 * (sp + sp.adjoint());
  out.sy = -0.5 * kI * (sp - sp.adjoint());
  out.sz = sz;
  return out;
}

Mat kron(const Mat& a, const Mat& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

EigenSystem eigensystem(const Mat& h) {
  if (h.rows() != h.cols()) throw NumericError("eigensystem needs a square matrix");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw NumericError("eigensystem needs a Hermitian matrix");

  Eigen::SelfAdjointEigenSolver<Mat> solver(h);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigensolver failed to converge");

  EigenSystem es;
  es.values = solver.eigenvalues();
  es.vectors = solver.eigenvectors();

  const Mat recon = es.vectors * es.values.asDiagonal() * es.vectors.adjoint();
  if ((recon - h).cwiseAbs().maxCoeff() > 1e-8 * h.rows() * scale)
    throw NumericError("eigendecomposition residual too large");

  const int n = static_cast<int>(h.rows());
  es.dominant.resize(n);
  es.dominant_weight.resize(n);
  for (int j = 0; j < n; ++j) {
    int best = 0;
    double w = std::norm(es.vectors(0, j));
    for (int r = 1; r < n; ++r) {
      const double wr = std::norm(es.vectors(r, j));
      if (wr > w) {
        w = wr;
        best = r;
      }
    }
    es.dominant[j] = best;
    es.dominant_weight[j] = w;
  }
  return es;
}

LevelLabel nv_level_label(const EigenSystem& es, int level, Isotope iso) {
  const int nd = nuclear_dim(iso);
  const int idx = es.dominant[level];
  LevelLabel label;
  label.ms = 1.0 - idx / nd;
  label.mi = nuclear_spin(iso) - idx % nd;
  label.ambiguous = es.dominant_weight[level] < 0.5;
  return label;
}

AxisAngle rotation_to_axis(const Vec3& direction) {
  const Vec3 k = Vec3::UnitZ().cross(direction);
  const double sin_t = k.norm();
  const double cos_t = direction.z();
  if (sin_t < 1e-12) {
    if (cos_t > 0.0) return {Vec3::UnitZ(), 0.0};
    return {Vec3::UnitX(), std::numbers::pi};  // antiparallel: flip about x
  }
  return {k / sin_t, std::atan2(sin_t, cos_t)};
}

Eigen::Matrix3d rotation_matrix(const AxisAngle& aa) {
  return Eigen::AngleAxisd(aa.angle, aa.axis).toRotationMatrix();
}

Mat spin_rotation_operator(const AxisAngle& aa, double s) {
  const SpinMatrices j = spin_matrices(s);
  const Mat gen =
      aa.axis.x() * j.sx + aa.axis.y() * j.sy + aa.axis.z() * j.sz;
  Eigen::SelfAdjointEigenSolver<Mat> solver(gen);
  const Eigen::VectorXd w = solver.eigenvalues();
  Mat phases = Mat::Zero(w.size(), w.size());
  for (int i = 0; i < w.size(); ++i)
    phases(i, i) = std::exp(-kI * aa.angle * w[i]);
  return solver.eigenvectors() * phases * solver.eigenvectors().adjoint();
}

Mat nv_frame_operator(Orientation o, Isotope iso) {
  const AxisAngle aa = rotation_to_axis(axis(o));
  const Mat ue = spin_rotation_operator(aa, 1.0);
  const int nd = nuclear_dim(iso);
  if (nd == 1) return ue;
  return kron(ue, spin_rotation_operator(aa, nuclear_spin(iso)));
}

Mat single_nv_hamiltonian(Orientation o, const Vec3& b_mt,
                          const PhysicalConstants& c, Isotope iso) {
  const SpinMatrices S = spin_matrices(1.0);
  const Vec3 bl =
      rotation_matrix(rotation_to_axis(axis(o))).transpose() * b_mt;

  Mat he = c.d_mhz * S.sz * S.sz +
           c.gamma_e_mhz_per_mt *
               (bl.x() * S.sx + bl.y() * S.sy + bl.z() * S.sz);

  const int nd = nuclear_dim(iso);
  if (nd == 1) return he;

  const SpinMatrices I = spin_matrices(nuclear_spin(iso));
  const Mat in = Mat::Identity(nd, nd);
  Mat h = kron(he, in);
  h += c.a_par_mhz * kron(S.sz, I.sz);
  h += c.a_perp_mhz * (kron(S.sx, I.sx) + kron(S.sy, I.sy));
  h += c.q_mhz * kron(Mat::Identity(3, 3), I.sz * I.sz);
  return h;
}

Mat two_nv_hamiltonian(Orientation o1, Orientation o2, const Vec3& b_mt,
                       const Vec3& n12, const PhysicalConstants& c,
                       Isotope iso) {
  if (std::abs(n12.norm() - 1.0) > 1e-9)
    throw ValidationError("inter-NV direction must be a unit vector");

  const int nd = nuclear_dim(iso);
  const int n = 3 * nd;
  const Mat id = Mat::Identity(n, n);

  const Mat u1 = nv_frame_operator(o1, iso);
  const Mat u2 = nv_frame_operator(o2, iso);
  const Mat h1 = u1 * single_nv_hamiltonian(o1, b_mt, c, iso) * u1.adjoint();
  const Mat h2 = u2 * single_nv_hamiltonian(o2, b_mt, c, iso) * u2.adjoint();

  Mat h = kron(h1, id) + kron(id, h2);

  const SpinMatrices S = spin_matrices(1.0);
  const Mat in = Mat::Identity(nd, nd);
  const std::array<Mat, 3> se = {kron(S.sx, in), kron(S.sy, in),
                                 kron(S.sz, in)};
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      const double coef = 3.0 * n12[j] * n12[k] - (j == k ? 1.0 : 0.0);
      if (coef != 0.0) h += (c.d_dd_mhz * coef) * kron(se[j], se[k]);
    }
  }
  return h;
}

}  // namespace nvx
