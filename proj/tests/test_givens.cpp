#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pst/families.hpp"
#include "pst/givens.hpp"

using namespace pst;
using Catch::Approx;

namespace {

SymmetricMatrix random_symmetric(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1, 1);
  SymmetricMatrix h(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) h.set(i, j, u(rng));
  return h;
}

std::vector<double> band(const SymmetricMatrix& T, int which) {
  std::vector<double> v;
  for (std::size_t k = 0; k + std::size_t(which) < T.size(); ++k) v.push_back(T(k, k + std::size_t(which)));
  return v;
}

}  // namespace

TEST_CASE("rotation_zeroing conventions") {
  const auto id = rotation_zeroing(1, 0, 0, 1);
  CHECK(id.c == 1.0);
  CHECK(id.s == 0.0);

  const auto g = rotation_zeroing(3, 4, 2, 5);
  CHECK(g.c == Approx(0.6).epsilon(1e-15));
  CHECK(g.s == Approx(0.8).epsilon(1e-15));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(6);
  x(2) = 3;
  x(5) = 4;
  const Eigen::VectorXd y = g.dense(6) * x;
  CHECK(y(2) == Approx(5.0).epsilon(1e-15));
  CHECK(std::abs(y(5)) < 1e-15);

  const auto neg = rotation_zeroing(-3, 4, 0, 1);
  CHECK(neg.c * -3 + neg.s * 4 == Approx(5.0));

  CHECK_THROWS_AS(rotation_zeroing(0, 0, 0, 1), rotation_error);
  CHECK_THROWS_AS(rotation_zeroing(1, 1, 2, 2), rotation_error);
  CHECK_THROWS_AS(rotation_zeroing(1, 1, 3, 2), rotation_error);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int k = 0; k < 100; ++k) {
    const auto r = rotation_zeroing(u(rng), u(rng), 0, 1);
    CHECK(std::abs(r.c * r.c + r.s * r.s - 1.0) < 1e-14);
  }
}

TEST_CASE("apply_similarity") {
  std::mt19937_64 rng(9);
  const auto h = random_symmetric(rng, 8);
  CHECK(apply_similarity(h, GivensRotation{2, 5, 1.0, 0.0}) == h);

  const auto g = rotation_zeroing(0.3, -0.7, 2, 5);
  const auto h2 = apply_similarity(h, g);
  CHECK(h2.dense() == h2.dense().transpose());
  const Eigen::MatrixXd G = g.dense(8);
  CHECK((h2.dense() - G * h.dense() * G.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      if (i != 2 && i != 5 && j != 2 && j != 5) CHECK(h2(i, j) == h(i, j));
  CHECK(oracle::max_dev(oracle::jacobi_eigenvalues(h.dense()), oracle::jacobi_eigenvalues(h2.dense())) < 1e-10);
  CHECK_THROWS_AS(apply_similarity(h, GivensRotation{2, 9, 1.0, 0.0}), validation_error);
}

TEST_CASE("merging two bridge sites with one rotation") {
  const double x = 2, y = 1.3, z = 0.7, w = 0.9;
  const auto h = one_excitation_hamiltonian(families::tri_coutinho(x, y, z, w));
  const auto g = rotation_zeroing(y, w, 5, 6);
  CHECK(g.c == Approx(y / std::hypot(y, w)));
  CHECK(g.s == Approx(w / std::hypot(y, w)));
  const auto h6 = apply_similarity(h, g);
  const auto want = one_excitation_hamiltonian(families::coutinho(x, std::hypot(y, w), z));
  CHECK((h6.dense().topLeftCorner(6, 6) - want.dense()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(h6.dense().row(6).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tridiagonal input is left alone") {
  SymmetricMatrix h(5);
  for (std::size_t i = 0; i < 5; ++i) h.set(i, i, 0.1 * double(i));
  for (std::size_t i = 0; i + 1 < 5; ++i) h.set(i, i + 1, 1.0 + double(i));
  const auto r = tridiagonalize(h);
  CHECK(r.rotations.empty());
  CHECK(r.Q == Eigen::MatrixXd::Identity(5, 5));
  CHECK(r.T == h);
  REQUIRE(r.blocks.size() == 1);
  CHECK(r.blocks[0].length == 5);
}

TEST_CASE("negative couplings on a chain become a sign gauge") {
  SymmetricMatrix h(4);
  h.set(0, 1, -1.0);
  h.set(1, 2, 2.0);
  h.set(2, 3, -3.0);
  const auto r = tridiagonalize(h);
  CHECK(r.rotations.empty());
  CHECK(band(r.T, 1) == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(r.Q.cwiseAbs() == Eigen::MatrixXd::Identity(4, 4));
  CHECK(r.Q(0, 0) == 1.0);
  CHECK((r.Q * h.dense() * r.Q.transpose() - r.T.dense()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eight-site hexagon reduces to a six-site chain and a pair") {
  const auto r = tridiagonalize(one_excitation_hamiltonian(families::coutinho_n8(std::sqrt(5.0), 2, 2, 3)));
  REQUIRE(r.blocks.size() == 2);
  const auto& a = r.blocks[0];
  CHECK(a.length == 6);
  CHECK(oracle::max_dev(a.offdiag, {std::sqrt(5.0), 2 * std::sqrt(2.0), 3, 2 * std::sqrt(2.0), std::sqrt(5.0)}) <
        1e-10);
  CHECK(oracle::max_dev(a.diag, std::vector<double>(6, 0.0)) < 1e-10);
  CHECK(r.blocks[1].length == 2);
  CHECK(r.blocks[1].offdiag[0] == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("decorated eight-site chain reduction") {
  const auto r = tridiagonalize(
      one_excitation_hamiltonian(families::decorated8(1, 1, 1, std::sqrt(3.0), std::sqrt(2.5))));
  REQUIRE(r.blocks.size() == 2);
  CHECK(oracle::max_dev(r.blocks[0].offdiag, {1, std::sqrt(3.0), std::sqrt(2.5), std::sqrt(3.5),
                                              std::sqrt(15.0 / 7), std::sqrt(13.0 / 7)}) < 1e-10);
  CHECK(r.blocks[1].null_block);
  CHECK(r.blocks[1].length == 1);
}

TEST_CASE("decorated eleven-site chain reduction") {
  const auto r = tridiagonalize(one_excitation_hamiltonian(
      families::decorated11(1, 1, 3 / std::sqrt(2.0), std::sqrt(3.5), std::sqrt(5.0))));
  REQUIRE(r.blocks.size() == 2);
  CHECK(r.blocks[0].length == 9);
  CHECK(oracle::max_dev(r.blocks[0].offdiag,
                        {1, 3 / std::sqrt(2.0), std::sqrt(3.5), std::sqrt(6.0), 5 / std::sqrt(6.0), 4 / std::sqrt(3.0),
                         3 * std::sqrt(21.0) / 8, std::sqrt(163.0) / 8}) < 1e-10);
  CHECK(r.blocks[1].null_block);
  CHECK(r.blocks[1].length == 2);
}

TEST_CASE("split_blocks") {
  SECTION("zero matrix is one null block") {
    const auto r = tridiagonalize(SymmetricMatrix(4));
    REQUIRE(r.blocks.size() == 1);
    CHECK(r.blocks[0].null_block);
    CHECK(r.blocks[0].length == 4);
  }
  SECTION("bipartite bridge graph splits into 5 + 2") {
    const auto r = tridiagonalize(
        one_excitation_hamiltonian(families::bipartite_wheatstone(2, std::sqrt(3.0), -std::sqrt(3.0), 1)));
    REQUIRE(r.blocks.size() == 2);
    CHECK(r.blocks[0].length == 5);
    CHECK(r.blocks[1].length == 2);
  }
  SECTION("cut below the tolerance") {
    SymmetricMatrix t(3);
    t.set(0, 1, 1.0);
    t.set(1, 2, 1e-14);
    t.set(2, 2, 2.0);
    const auto blocks = split_blocks(t, 1e-12);
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[1].offset == 2);
    CHECK_FALSE(blocks[1].null_block);
  }
}

TEST_CASE("site images") {
  const auto r = tridiagonalize(one_excitation_hamiltonian(families::coutinho(2, std::sqrt(2.0), 2)));
  const auto img = site_image(r, 0);
  REQUIRE(img.chain_site);
  CHECK(*img.chain_site == 0);
  CHECK(img.vector(0) == 1.0);
  const auto far = site_image(r, 4);
  REQUIRE(far.chain_site);
  CHECK(*far.chain_site == 4);

  SymmetricMatrix chain(3);
  chain.set(0, 1, 1.0);
  chain.set(1, 2, 1.0);
  const auto id = tridiagonalize(chain);
  for (std::size_t i = 0; i < 3; ++i) CHECK(*site_image(id, i).chain_site == i);

  const auto dec = tridiagonalize(
      one_excitation_hamiltonian(families::decorated8(1, 1, 1, std::sqrt(3.0), std::sqrt(2.5))));
  CHECK(*site_image(dec, 1).chain_site == 1);
  CHECK_FALSE(site_image(dec, 7).chain_site);
  CHECK_THROWS_AS(site_image(dec, 8), validation_error);
}

TEST_CASE("reduction invariants on random matrices") {
  std::mt19937_64 rng(21);
  for (std::size_t n : {1, 2, 3, 5, 8, 13, 21, 34, 64}) {
    const auto h = random_symmetric(rng, n);
    const auto r = tridiagonalize(h);
    CHECK(r.T.is_tridiagonal());
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(Eigen::Index(n), Eigen::Index(n));
    CHECK((r.Q * r.Q.transpose() - I).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((r.Q * h.dense() * r.Q.transpose() - r.T.dense()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(oracle::max_dev(oracle::jacobi_eigenvalues(h.dense()),
                          oracle::sturm_eigenvalues(band(r.T, 0), band(r.T, 1))) < 1e-10 * h.max_abs());
    std::size_t total = 0;
    for (const auto& b : r.blocks) {
      total += b.length;
      for (double j : b.offdiag) CHECK(j >= 0.0);
    }
    CHECK(total == n);
    CHECK(r.Q(0, 0) == 1.0);
    CHECK(tridiagonalize(r.T).rotations.empty());
  }
}

TEST_CASE("leading block equals the Lanczos chain from site 0") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 3 + std::size_t(rep % 9);
    std::vector<Edge> e;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (u(rng) < 0.4) e.push_back({a, b, u(rng) < 0.5 ? -0.5 - u(rng) : 0.5 + u(rng)});
    std::vector<double> f(n);
    for (auto& b : f) b = u(rng) - 0.5;
    const auto h = one_excitation_hamiltonian(SpinGraph(n, e, f));
    const auto r = tridiagonalize(h);
    const auto lz = oracle::lanczos(h.dense(), 0);
    const auto& b = r.blocks[0];
    REQUIRE(b.length == lz.diag.size());
    CHECK(oracle::max_dev(b.diag, lz.diag) < 1e-10);
    CHECK(oracle::max_dev(b.offdiag, lz.offdiag) < 1e-10);
  }
}
