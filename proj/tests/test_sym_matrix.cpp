#include <doctest.h>

#include <cmath>

#include "spdcone/harness.hpp"
#include "spdcone/sym_matrix.hpp"

using namespace spdcone;

namespace {

SamplerConfig cfg_n(int n, uint64_t seed) {
  SamplerConfig c;
  c.n = n;
  c.seed = seed;
  return c;
}

double reconstruct_error(const SymMatrix& s, const EigDecomposition& e) {
  const int n = s.dim();
  double err = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k)
        v += e.basis[static_cast<size_t>(i) * n + k] * e.values[k] *
             e.basis[static_cast<size_t>(j) * n + k];
      err = std::max(err, std::abs(v - s(i, j)));
    }
  return err;
}

double orthonormality_error(const EigDecomposition& e) {
  const int n = e.n;
  double err = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i)
        dot += e.basis[static_cast<size_t>(i) * n + a] *
               e.basis[static_cast<size_t>(i) * n + b];
      err = std::max(err, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  return err;
}

}  // namespace

TEST_CASE("sym_eig on diagonal and classic 2x2 inputs") {
  const double d31[] = {3.0, 1.0};
  auto e = sym_eig(SymMatrix::diag(d31));
  CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.values[1] == doctest::Approx(3.0).epsilon(1e-14));

  e = sym_eig(SymMatrix::identity(2));
  CHECK(e.values[0] == doctest::Approx(1.0));
  CHECK(e.values[1] == doctest::Approx(1.0));
  CHECK(orthonormality_error(e) < 1e-12);

  const double m[] = {2.0, 1.0, 1.0, 2.0};
  const SymMatrix s = SymMatrix::from_entries(2, m);
  e = sym_eig(s);
  CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.values[1] == doctest::Approx(3.0).epsilon(1e-14));
  // First column parallel to (1,-1)/sqrt(2), second to (1,1)/sqrt(2).
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(e.basis[0] * inv_sqrt2 - e.basis[2] * inv_sqrt2) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(e.basis[1] * inv_sqrt2 + e.basis[3] * inv_sqrt2) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(reconstruct_error(s, e) < 1e-12 * s.frobenius_norm());
}

TEST_CASE("sym_eig reconstruction and orthonormality on random inputs") {
  for (int n = 2; n <= 6; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      RngStream rng = RngStream::for_index(100 + n, rep);
      SamplerConfig cfg = cfg_n(n, 0);
      cfg.anisotropy = 2.0;
      const SPDMatrix a = sample_spd(cfg, rng);
      const EigDecomposition e = sym_eig(a.sym());
      CHECK(reconstruct_error(a.sym(), e) <= 1e-12 * a.sym().frobenius_norm());
      CHECK(orthonormality_error(e) <= 1e-12);
      for (int k = 0; k + 1 < n; ++k) CHECK(e.values[k] <= e.values[k + 1]);
    }
  }
}

TEST_CASE("SymMatrix constructor symmetrizes or rejects") {
  const double near[] = {1.0, 1.0 + 5e-13, 1.0, 1.0};
  const SymMatrix s = SymMatrix::from_entries(2, near);
  CHECK(s(0, 1) == s(1, 0));

  const double bad[] = {1.0, 1.0 + 2e-8, 1.0, 1.0};
  CHECK_THROWS_AS(SymMatrix::from_entries(2, bad), std::invalid_argument);

  const double nan_entries[] = {1.0, 0.0, 0.0, std::nan("")};
  CHECK_THROWS_AS(SymMatrix::from_entries(2, nan_entries),
                  std::invalid_argument);
}

TEST_CASE("spd_fun named cases") {
  CHECK(spd_log(SPDMatrix::identity(2)).frobenius_norm() == 0.0);

  const double d49[] = {4.0, 9.0};
  const SymMatrix r = spd_fun(SPDMatrix::diag(d49), SpdFun::Sqrt);
  CHECK(r(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r(1, 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(r(0, 1) == doctest::Approx(0.0));

  const double de[] = {std::exp(2.0), 1.0};
  const SymMatrix lg = spd_log(SPDMatrix::diag(de));
  CHECK(lg(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(lg(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("spd log and exp are mutually inverse") {
  for (int rep = 0; rep < 30; ++rep) {
    RngStream rng = RngStream::for_index(7, rep);
    const SPDMatrix a = sample_spd(cfg_n(2 + rep % 3, 0), rng);
    const SPDMatrix back = sym_exp(spd_log(a));
    double err = 0.0;
    for (int i = 0; i < a.dim(); ++i)
      for (int j = 0; j < a.dim(); ++j)
        err = std::max(err, std::abs(back(i, j) - a(i, j)));
    CHECK(err <= 1e-10 * a.sym().max_abs());
  }
}

TEST_CASE("SPD constructor rejects indefinite and near-singular input") {
  const double indef[] = {1.0, -1.0};
  CHECK_THROWS_AS(SPDMatrix::diag(indef), std::invalid_argument);
  const double nearsing[] = {1.0, 1e-14};
  CHECK_THROWS_AS(SPDMatrix::diag(nearsing), std::invalid_argument);
  const double fine[] = {1.0, 1e-10};
  CHECK_NOTHROW(SPDMatrix::diag(fine));
}

TEST_CASE("UnitDetSPD checks and projects the determinant") {
  const double ok[] = {2.0, 0.5};
  CHECK_NOTHROW(UnitDetSPD(SPDMatrix::diag(ok)));
  const double off[] = {2.0, 0.6};
  CHECK_THROWS_AS(UnitDetSPD(SPDMatrix::diag(off)), std::invalid_argument);
  const UnitDetSPD p = UnitDetSPD::project(SPDMatrix::diag(off));
  CHECK(p.spd().det() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("determinants, inverses and congruence") {
  const double d23[] = {2.0, 3.0};
  const SPDMatrix a = SPDMatrix::diag(d23);
  CHECK(a.det() == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(a.log_det() == doctest::Approx(std::log(6.0)).epsilon(1e-14));

  for (int n = 2; n <= 4; ++n) {
    RngStream rng = RngStream::for_index(55, n);
    const SPDMatrix m = sample_spd(cfg_n(n, 0), rng);
    CHECK(detail::sym_det(n, m.entries().data()) ==
          doctest::Approx(m.det()).epsilon(1e-11));
    std::vector<double> inv(static_cast<size_t>(n) * n);
    REQUIRE(detail::sym_inverse(n, m.entries().data(), inv.data()));
    std::vector<double> prod(static_cast<size_t>(n) * n);
    detail::mat_mul(n, m.entries().data(), inv.data(), prod.data());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(prod[static_cast<size_t>(i) * n + j] ==
              doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
  }

  // congruence by the identity is the identity map
  RngStream rng = RngStream::for_index(56, 0);
  const SPDMatrix m = sample_spd(cfg_n(3, 0), rng);
  const SymMatrix same = congruence(m.sym(), SymMatrix::identity(3).entries());
  CHECK(same.same_entries(m.sym()));
}
