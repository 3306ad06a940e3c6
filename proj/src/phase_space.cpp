#include "squeezelab/phase_space.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "squeezelab/gates.hpp"
#include "squeezelab/quadrature.hpp"

namespace squeezelab {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

void GridSpec::validate() const {
  if (nx < 1 || np < 1) throw ValidationError("grid counts must be >= 1");
  if (!(x_max >= x_min) || !(p_max >= p_min)) throw ValidationError("grid ranges must be ordered");
  if ((nx > 1 && x_max == x_min) || (np > 1 && p_max == p_min)) throw ValidationError("degenerate grid range");
}

double WignerGrid::integral() const { return values.sum() * spec.dx() * spec.dp(); }

double MarginalDistribution::integral() const {
  double s = 0.0;
  for (size_t i = 1; i < xs.size(); ++i) s += 0.5 * (xs[i] - xs[i - 1]) * (pdf[i] + pdf[i - 1]);
  return s;
}

double wigner_at(const DensityMatrix& rho, double x, double p) {
  const int n = rho.dim();
  const CMatrix d = displacement_matrix(Complex(x, p) * std::sqrt(2.0), n);
  const CMatrix& r = rho.matrix();
  Complex sum = 0.0;
  for (int col = 0; col < n; ++col) {
    const double parity = col % 2 == 0 ? 1.0 : -1.0;
    // sum_m rho_{col,m} D_{m,col}
    sum += parity * r.row(col).transpose().cwiseProduct(d.col(col)).sum();
  }
  if (std::abs(sum.imag()) > 1e-10) {
    throw ValidationError(fmt::format("Wigner value has imaginary part {:.3e}", sum.imag()));
  }
  return sum.real() / kPi;
}

WignerGrid wigner(const DensityMatrix& rho, const GridSpec& spec, bool require_coverage) {
  spec.validate();
  if (require_coverage) {
    const double radius = 2.0 * std::sqrt(2.0 * mean_photon_number(rho) + 1.0);
    const double reach = std::min({-spec.x_min, spec.x_max, -spec.p_min, spec.p_max});
    if (reach < radius) {
      throw ValidationError(
          fmt::format("Wigner grid reaches {:.3g} but the state needs radius {:.3g}", reach, radius));
    }
  }
  WignerGrid grid{spec, Eigen::MatrixXd(spec.nx, spec.np)};
  for (int i = 0; i < spec.nx; ++i) {
    for (int j = 0; j < spec.np; ++j) grid.values(i, j) = wigner_at(rho, spec.x(i), spec.p(j));
  }
  return grid;
}

WignerMinimum wigner_min(const DensityMatrix& rho, const GridSpec& region) {
  region.validate();
  WignerMinimum best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (int i = 0; i < region.nx; ++i) {
    for (int j = 0; j < region.np; ++j) {
      const double w = wigner_at(rho, region.x(i), region.p(j));
      if (w < best.value) best = {w, region.x(i), region.p(j)};
    }
  }
  double hx = region.dx() > 0 ? region.dx() : 0.05;
  double hp = region.dp() > 0 ? region.dp() : 0.05;
  while (hx > 1e-7 && hp > 1e-7) {
    const double cx = best.x;
    const double cp = best.p;
    double f[3][3];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) f[a][b] = wigner_at(rho, cx + (a - 1) * hx, cp + (b - 1) * hp);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (f[a][b] < best.value) best = {f[a][b], cx + (a - 1) * hx, cp + (b - 1) * hp};
    // Newton step of the local quadratic model.
    const double gx = (f[2][1] - f[0][1]) / (2 * hx);
    const double gp = (f[1][2] - f[1][0]) / (2 * hp);
    const double hxx = (f[2][1] - 2 * f[1][1] + f[0][1]) / (hx * hx);
    const double hpp = (f[1][2] - 2 * f[1][1] + f[1][0]) / (hp * hp);
    const double hxp = (f[2][2] - f[2][0] - f[0][2] + f[0][0]) / (4 * hx * hp);
    const double det = hxx * hpp - hxp * hxp;
    if (hxx > 0 && det > 0) {
      const double sx = -(hpp * gx - hxp * gp) / det;
      const double sp = -(hxx * gp - hxp * gx) / det;
      if (std::abs(sx) <= hx && std::abs(sp) <= hp) {
        const double w = wigner_at(rho, cx + sx, cp + sp);
        if (w < best.value) best = {w, cx + sx, cp + sp};
      }
    }
    hx *= 0.5;
    hp *= 0.5;
  }
  return best;
}

MarginalDistribution marginal(const DensityMatrix& rho, double theta, const std::vector<double>& xs) {
  const double support = quadrature_support(rho.dim());
  MarginalDistribution out{theta, xs, std::vector<double>(xs.size())};
  for (size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i]) > support) {
      throw ValidationError(fmt::format("marginal abscissa {} outside support {:.3g}", xs[i], support));
    }
    const CVector v = quadrature_eigenvector(theta, xs[i], rho.dim());
    out.pdf[i] = v.dot(rho.matrix() * v).real();
  }
  return out;
}

std::vector<double> uniform_grid(double limit, int count) {
  if (count < 2 || !(limit > 0)) throw ValidationError("uniform grid needs count >= 2 and limit > 0");
  std::vector<double> xs(count);
  for (int i = 0; i < count; ++i) xs[i] = -limit + 2.0 * limit * i / (count - 1);
  return xs;
}

double negativity_volume(const DensityMatrix& rho, const GridSpec& spec) {
  const WignerGrid grid = wigner(rho, spec);
  return grid.values.cwiseAbs().sum() * spec.dx() * spec.dp() - 1.0;
}

}  // namespace squeezelab
