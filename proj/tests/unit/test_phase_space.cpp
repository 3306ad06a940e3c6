#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "squeezelab/gates.hpp"
#include "squeezelab/phase_space.hpp"

using namespace squeezelab;

namespace {

constexpr double kPi = std::numbers::pi;

DensityMatrix photon_mixture(double p1, int cutoff) {
  CMatrix m = CMatrix::Zero(cutoff, cutoff);
  m(1, 1) = p1;
  m(0, 0) = 1.0 - p1;
  return DensityMatrix(m);
}

}  // namespace

TEST(Wigner, OriginValues) {
  EXPECT_NEAR(wigner_at(ket_to_dm(make_fock(0, 10)), 0, 0), 1 / kPi, 1e-14);
  EXPECT_NEAR(wigner_at(ket_to_dm(make_fock(1, 10)), 0, 0), -1 / kPi, 1e-14);
  EXPECT_NEAR(wigner_at(photon_mixture(0.84, 10), 0, 0), -0.68 / kPi, 1e-14);
  EXPECT_NEAR(-0.68 / kPi, -0.216, 5e-4);
  const double exp_photon = wigner_at(prepare_experimental_photon(LossBudget::experiment(), 10), 0, 0);
  EXPECT_NEAR(exp_photon, -0.22, 0.01);
}

TEST(Wigner, ClosedForms) {
  const Complex alpha(0.7, -0.4);
  const DensityMatrix coh = ket_to_dm(make_coherent(alpha, 40));
  const DensityMatrix one = ket_to_dm(make_fock(1, 40));
  const double x0 = std::sqrt(2.0) * alpha.real();
  const double p0 = std::sqrt(2.0) * alpha.imag();
  for (double x : {-2.0, -0.3, 0.0, 1.1, 2.5}) {
    for (double p : {-1.7, 0.0, 0.4, 3.0}) {
      const double coh_ref = std::exp(-(x - x0) * (x - x0) - (p - p0) * (p - p0)) / kPi;
      EXPECT_NEAR(wigner_at(coh, x, p), coh_ref, 1e-13);
      const double r2 = x * x + p * p;
      EXPECT_NEAR(wigner_at(one, x, p), (2 * r2 - 1) * std::exp(-r2) / kPi, 1e-13);
    }
  }
}

TEST(Wigner, UnitIntegral) {
  for (const DensityMatrix& rho : {ket_to_dm(make_fock(1, 30)), ket_to_dm(make_css(0.97, Parity::odd, 30)),
                                   squeeze(ket_to_dm(make_fock(1, 40)), 0.37)}) {
    const WignerGrid g = wigner(rho, GridSpec{-6, 6, 121, -6, 6, 121});
    EXPECT_NEAR(g.integral(), 1.0, 1e-2);
  }
}

TEST(Wigner, CoverageCheck) {
  const DensityMatrix big = squeeze(ket_to_dm(make_fock(1, 40)), 0.67);
  EXPECT_THROW(wigner(big, GridSpec{-2, 2, 5, -2, 2, 5}), ValidationError);
  EXPECT_NO_THROW(wigner(big, GridSpec{-2, 2, 5, -2, 2, 5}, false));
}

TEST(Wigner, LinearityAndRotation) {
  const DensityMatrix a = ket_to_dm(make_css(Complex(0.8, 0.3), Parity::odd, 30));
  const DensityMatrix b = ket_to_dm(make_coherent(Complex(-0.5, 0.2), 30));
  const DensityMatrix mix = a.mixed_with(b, 0.3);
  const double theta = 0.9;
  const CMatrix r = rotate(theta, 30).matrix();
  const DensityMatrix rotated = DensityMatrix::normalized(r * a.matrix() * r.adjoint());
  for (double x : {-1.0, 0.2, 1.3}) {
    for (double p : {-0.6, 0.0, 0.9}) {
      EXPECT_NEAR(wigner_at(mix, x, p), 0.3 * wigner_at(a, x, p) + 0.7 * wigner_at(b, x, p), 1e-12);
      const double xr = x * std::cos(theta) - p * std::sin(theta);
      const double pr = x * std::sin(theta) + p * std::cos(theta);
      EXPECT_NEAR(wigner_at(rotated, x, p), wigner_at(a, xr, pr), 1e-12);
    }
  }
}

TEST(WignerMin, KnownStates) {
  const WignerMinimum one = wigner_min(ket_to_dm(make_fock(1, 20)));
  EXPECT_NEAR(one.value, -1 / kPi, 1e-12);
  EXPECT_NEAR(one.x, 0.0, 1e-6);
  EXPECT_NEAR(one.p, 0.0, 1e-6);
  EXPECT_GE(wigner_min(ket_to_dm(make_fock(0, 20))).value, 0.0);
  const WignerMinimum cat = wigner_min(ket_to_dm(make_css(0.97, Parity::odd, 30)));
  EXPECT_NEAR(cat.value, -1 / kPi, 1e-10);
  EXPECT_NEAR(std::hypot(cat.x, cat.p), 0.0, 1e-5);
}

TEST(WignerMin, RefinesOffGridMinimum) {
  // Displaced photon: minimum at (sqrt(2) Re beta, sqrt(2) Im beta).
  const Complex beta(0.3137, -0.2211);
  const CMatrix d = displace(beta, 30).matrix();
  const DensityMatrix rho = DensityMatrix::normalized(d * ket_to_dm(make_fock(1, 30)).matrix() * d.adjoint());
  const WignerMinimum m = wigner_min(rho);
  EXPECT_NEAR(m.value, -1 / kPi, 1e-10);
  EXPECT_NEAR(m.x, std::sqrt(2.0) * beta.real(), 1e-5);
  EXPECT_NEAR(m.p, std::sqrt(2.0) * beta.imag(), 1e-5);
}

TEST(Marginal, SinglePhotonIsPhaseInsensitive) {
  const DensityMatrix one = ket_to_dm(make_fock(1, 10));
  const std::vector<double> xs = uniform_grid(5.0, 101);
  for (double theta : {0.0, 0.7, 2.0}) {
    const MarginalDistribution m = marginal(one, theta, xs);
    for (size_t i = 0; i < xs.size(); ++i) {
      EXPECT_NEAR(m.pdf[i], 2 * xs[i] * xs[i] * std::exp(-xs[i] * xs[i]) / std::sqrt(kPi), 1e-14);
    }
    EXPECT_NEAR(m.integral(), 1.0, 1e-6);
  }
}

TEST(Marginal, SqueezedPhotonVarianceRatio) {
  const DensityMatrix s = squeeze(ket_to_dm(make_fock(1, 40)), 0.26);
  const std::vector<double> xs = uniform_grid(8.0, 1601);
  auto var = [&](double theta) {
    const MarginalDistribution m = marginal(s, theta, xs);
    double m2 = 0.0;
    for (size_t i = 1; i < xs.size(); ++i) {
      m2 += 0.5 * (xs[i] - xs[i - 1]) * (m.pdf[i] * xs[i] * xs[i] + m.pdf[i - 1] * xs[i - 1] * xs[i - 1]);
    }
    return m2;
  };
  EXPECT_NEAR(var(kPi / 2) / var(0.0), std::exp(-4 * 0.26), 1e-8);
}

TEST(Marginal, CatInterferenceNode) {
  const DensityMatrix cat = ket_to_dm(make_css(0.97, Parity::odd, 30));
  EXPECT_NEAR(marginal(cat, kPi / 2, {0.0}).pdf[0], 0.0, 1e-15);
  EXPECT_THROW(marginal(cat, 0.0, {50.0}), ValidationError);
}

TEST(Marginal, RadonConsistency) {
  const std::vector<DensityMatrix> states{ket_to_dm(make_css(Complex(0.9, 0.2), Parity::odd, 30)),
                                          prepare_experimental_photon(LossBudget::experiment(), 10),
                                          squeeze(ket_to_dm(make_fock(1, 40)), 0.37)};
  for (const auto& rho : states) {
    for (double theta : {0.0, 1.0, kPi / 2}) {
      for (double u : {-1.2, 0.0, 0.8}) {
        // Integrate W along the line x(theta) = u.
        const int n = 801;
        const double lim = 8.0;
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
          const double t = -lim + 2 * lim * k / (n - 1);
          const double w = wigner_at(rho, u * std::cos(theta) - t * std::sin(theta),
                                     u * std::sin(theta) + t * std::cos(theta));
          s += (k == 0 || k == n - 1 ? 0.5 : 1.0) * w;
        }
        s *= 2 * lim / (n - 1);
        EXPECT_NEAR(s, marginal(rho, theta, {u}).pdf[0], 1e-4);
      }
    }
  }
}

TEST(Negativity, VacuumAndPhoton) {
  EXPECT_NEAR(negativity_volume(ket_to_dm(make_fock(0, 10))), 0.0, 1e-3);
  // Integral of |(2r^2 - 1) e^{-r^2}|/pi over the plane is 4 e^{-1/2} - 1.
  EXPECT_NEAR(negativity_volume(ket_to_dm(make_fock(1, 10))), 4 * std::exp(-0.5) - 2, 1e-3);
}

TEST(Negativity, DecreasesWithLoss) {
  const DensityMatrix one = ket_to_dm(make_fock(1, 10));
  const GridSpec coarse{-5, 5, 101, -5, 5, 101};
  double previous = negativity_volume(one, coarse);
  for (double eta : {0.95, 0.85, 0.75, 0.65, 0.55}) {
    const double v = negativity_volume(loss_channel(one, eta), coarse);
    EXPECT_LT(v, previous) << eta;
    previous = v;
  }
  EXPECT_NEAR(negativity_volume(loss_channel(one, 0.45), coarse), 0.0, 1e-3);
}
