#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pst/design.hpp"
#include "pst/families.hpp"

using namespace pst;
using Catch::Approx;
using std::numbers::pi;

namespace {

GraphTemplate coutinho_template() {
  GraphTemplate t;
  t.n = 6;
  t.edges = {{0, 1, 2.0}, {1, 2, std::string("z")}, {2, 3, std::string("z")}, {3, 4, 2.0},
             {1, 5, std::string("y")}, {3, 5, std::string("y")}};
  return t;
}

GraphTemplate key_template() {
  GraphTemplate t;
  t.n = 8;
  const std::string x = "x", y = "y";
  t.edges = {{0, 1, x}, {1, 2, y}, {1, 3, y}, {2, 4, 1.5}, {3, 5, 1.5}, {2, 5, 1.5}, {3, 4, 1.5},
             {4, 6, y}, {5, 6, y}, {6, 7, x}};
  return t;
}

}  // namespace

TEST_CASE("move_to_front swaps site s with site 0") {
  const auto h = one_excitation_hamiltonian(families::coutinho(1, 2, 3));
  const auto m = move_to_front(h, 4);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(m(swapped_index(i, 4), swapped_index(j, 4)) == h(i, j));
  CHECK(move_to_front(h, 0) == h);
}

TEST_CASE("Coutinho template: every solution lies on y^2 + z^2 = 6") {
  DesignProblem prob;
  prob.graph = coutinho_template();
  prob.target = ChainBlock::chain(chain_pt_couplings(5));
  prob.seeds = 16;
  const auto sols = solve_parameters(prob);
  REQUIRE_FALSE(sols.empty());
  for (const auto& s : sols) {
    const double y = s.assignment.at("y"), z = s.assignment.at("z");
    CHECK(std::abs(y * y + z * z - 6) < 1e-8);
    CHECK(s.residual < 1e-10);
    CHECK(s.pt_report.verdict == Verdict::PT);
    // independent check: Lanczos chain of the bound graph
    const auto c = oracle::lanczos(one_excitation_hamiltonian(prob.graph.bind(s.assignment)).dense(), 0);
    CHECK(oracle::max_dev(c.offdiag, chain_pt_couplings(5)) < 1e-8);
  }
  for (std::size_t k = 1; k < sols.size(); ++k) CHECK(sols[k - 1].residual <= sols[k].residual);
}

TEST_CASE("solutions are reproducible for a fixed seed") {
  DesignProblem prob;
  prob.graph = coutinho_template();
  prob.target = ChainBlock::chain(chain_pt_couplings(5));
  prob.seeds = 8;
  prob.seed = 42;
  const auto a = solve_parameters(prob);
  const auto b = solve_parameters(prob);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].assignment == b[k].assignment);
}

TEST_CASE("key graph template recovers x and y from a spectrum") {
  DesignProblem prob;
  prob.graph = key_template();
  prob.target = jacobi_from_spectrum({-5, -3, -1, 1, 3, 5});
  prob.seeds = 32;
  prob.bounds = {{"x", {0.1, 5}}, {"y", {0.1, 5}}};
  const auto sols = solve_parameters(prob);
  REQUIRE_FALSE(sols.empty());
  const auto& best = sols.front();
  CHECK(std::abs(best.assignment.at("x")) == Approx(std::sqrt(5.0)).epsilon(1e-8));
  CHECK(std::abs(best.assignment.at("y")) == Approx(2.0).epsilon(1e-8));
  CHECK(best.pt_report.verdict == Verdict::PT);
}

TEST_CASE("design problem validation") {
  DesignProblem prob;
  prob.graph = coutinho_template();
  prob.target = ChainBlock::chain(chain_pt_couplings(4));
  CHECK_THROWS_AS(solve_parameters(prob), dimension_error);

  prob.target = ChainBlock::chain(chain_pt_couplings(5));
  prob.bounds = {{"x", {0, 1}}};
  CHECK_THROWS_AS(solve_parameters(prob), validation_error);

  prob.bounds.clear();
  prob.graph.params = {{"y", 1.0}, {"z", 1.0}};
  CHECK_THROWS_AS(solve_parameters(prob), validation_error);
}

TEST_CASE("design residual layout") {
  DesignProblem prob;
  prob.graph = coutinho_template();
  prob.target = ChainBlock::chain(chain_pt_couplings(5));
  const auto r = design_residual(prob, {{"y", std::sqrt(2.0)}, {"z", 2.0}});
  REQUIRE(r.size() == 4 + 5 + 1);
  CHECK(r.cwiseAbs().maxCoeff() < 1e-12);
  const auto off = design_residual(prob, {{"y", 1.0}, {"z", 1.0}});
  CHECK(off(1) == Approx(std::sqrt(2.0) - std::sqrt(6.0)));
}

TEST_CASE("verify_design") {
  const auto c = families::coutinho(2, std::sqrt(2.0), 2);
  const auto v = verify_design(c, 0, 4);
  CHECK(v.chain_test);
  CHECK(v.report.verdict == Verdict::PT);
  CHECK(*v.report.pt_time == Approx(pi / 2).epsilon(1e-10));
  CHECK(v.best.p > 1 - 1e-9);
  CHECK_FALSE(v.discrepancy);

  // reversed direction uses the same chain
  CHECK(verify_design(c, 4, 0).report.verdict == Verdict::PT);

  // interior pair: numeric decision only
  const auto w = verify_design(c, 0, 2);
  CHECK_FALSE(w.chain_test);
  CHECK(w.report.verdict == Verdict::NoPT);

  const auto same = verify_design(c, 3, 3);
  CHECK(same.report.verdict == Verdict::PT);
  CHECK(same.best.p == 1.0);

  const auto q = families::key_graph_params(1, 3, 5);
  const auto k = verify_design(families::key_graph(q.x, q.y, q.v, q.w), 0, 7);
  CHECK(k.chain_test);
  CHECK(k.report.verdict == Verdict::NoPT);
  CHECK_FALSE(k.discrepancy);

  CHECK_THROWS_AS(verify_design(c, 0, 6), validation_error);
}

TEST_CASE("piecewise evolution") {
  const auto h = one_excitation_hamiltonian(families::coutinho(2, std::sqrt(2.0), 2));
  const auto one = piecewise_evolve({{h, 0.7}}, 0);
  const auto two = piecewise_evolve({{h, 0.3}, {h, 0.0}, {h, 0.4}}, 0);
  CHECK((one - two).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((one - oracle::rk4_evolve(h.dense(), 0, 0.7)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK_THROWS_AS(piecewise_evolve({}, 0), validation_error);
  CHECK_THROWS_AS(piecewise_evolve({{h, -1.0}}, 0), validation_error);
  CHECK_THROWS_AS(piecewise_evolve({{h, 1.0}}, 6), validation_error);
  SymmetricMatrix small(3);
  CHECK_THROWS_AS(piecewise_evolve({{h, 1.0}, {small, 1.0}}, 0), validation_error);
}

TEST_CASE("retrieval schedule on the held key graph") {
  const auto p = families::key_graph_params(0, 1, 2);
  const auto hold = families::key_graph(p.x, p.y, -p.v, p.w);
  const auto s = retrieval_schedule(hold, 3);
  CHECK(s.J1 == Approx(p.x));
  CHECK(s.J2 == Approx(std::sqrt(2.0) * p.y));
  REQUIRE(s.times.size() == 3);
  const auto h = one_excitation_hamiltonian(hold);
  CHECK(s.max_survival_deviation(h, s.times.back()) < 1e-10);
  const Propagator prop(h);
  for (double t : s.times) CHECK(prop.probability(0, 0, t) > 1 - 1e-12);
  REQUIRE_FALSE(s.far_sites.empty());
  for (auto f : s.far_sites)
    for (double t : {0.4, 1.3, 2.9}) CHECK(std::norm(oracle::rk4_evolve(h.dense(), 0, t)(Eigen::Index(f))) < 1e-12);
  CHECK_THROWS_AS(retrieval_schedule(families::key_graph(p.x, p.y, p.v, p.w), 1), validation_error);
  CHECK_THROWS_AS(retrieval_schedule(families::coutinho(1, 1, 1), 1), validation_error);
}
