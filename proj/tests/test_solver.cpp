#include "imcgrmf/model_io.hpp"
#include "imcgrmf/solver.hpp"
#include "imcgrmf/synthetic.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <limits>

using namespace imcgrmf;

namespace {

ModelParams small_params(std::size_t latent, std::uint64_t seed = 1) {
  ModelParams params;
  params.latent_dim = latent;
  params.neighbors = 3;
  params.seed = seed;
  return params;
}

}  // namespace

TEST_CASE("soft_threshold") {
  CHECK(soft_threshold(3.0, 1.0) == 2.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
  CHECK(soft_threshold(0.5, 1.0) == 0.0);
  CHECK(soft_threshold(-1.0, 1.0) == 0.0);
  CHECK(soft_threshold(0.7, 0.0) == 0.7);
}

TEST_CASE("validate rejects unusable parameters") {
  std::mt19937_64 rng(1);
  const auto data = testing::random_dataset(4, {2, 3}, {5, 3}, rng);
  auto params = small_params(2);
  CHECK_NOTHROW(validate(params, data));
  params.latent_dim = 4;
  CHECK_THROWS_AS(validate(params, data), std::invalid_argument);
  params = small_params(0);
  CHECK_THROWS_AS(validate(params, data), std::invalid_argument);
  params = small_params(2);
  params.lambda1 = -1.0;
  CHECK_THROWS_AS(validate(params, data), std::invalid_argument);
  params = small_params(2);
  params.lambda2 = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate(params, data), std::invalid_argument);
  params = small_params(2);
  params.tol = 0.0;
  CHECK_THROWS_AS(validate(params, data), std::invalid_argument);
  params = small_params(2);
  params.max_iter = 0;
  CHECK_THROWS_AS(validate(params, data), std::invalid_argument);
  params = small_params(2);
  params.neighbors = 0;
  CHECK_THROWS_AS(validate(params, data), std::invalid_argument);
}

TEST_CASE("init_state is deterministic, orthonormal and consistent") {
  std::mt19937_64 rng(2);
  const auto data = testing::random_dataset(5, {3, 2}, {6, 4}, rng);
  const auto params = small_params(3, 77);
  const auto a = init_state(data, params);
  const auto b = init_state(data, params);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(a.bases[k] == b.bases[k]);
    CHECK(a.representations[k] == b.representations[k]);
    CHECK(orthonormality_error(a.bases[k]) < 1e-12);
    CHECK((a.representations[k].array() >= 0.0).all());
    CHECK((a.representations[k].array() < 1.0).all());
  }
  const Eigen::MatrixXd mean = (a.representations[0].topRows(5) + a.representations[1].topRows(5)) / 2.0;
  CHECK(a.consensus.isApprox(mean, 1e-14));
  const auto c = init_state(data, small_params(3, 78));
  CHECK(c.representations[0] != a.representations[0]);
}

TEST_CASE("orthonormalize_rows completes rank-deficient input") {
  Eigen::MatrixXd m(3, 4);
  m << 1, 0, 0, 0,
       2, 0, 0, 0,
       0, 0, 0, 0;
  const auto u = orthonormalize_rows(m);
  CHECK(orthonormality_error(u) < 1e-12);
  CHECK(u.row(0).isApprox(Eigen::RowVector4d(1, 0, 0, 0)));
}

TEST_CASE("procrustes_basis examples") {
  Eigen::Matrix2d s;
  s << 2, 0, 0, 1;
  CHECK(procrustes_basis(s).isApprox(Eigen::Matrix2d::Identity(), 1e-12));

  s << 0, 2, 1, 0;
  const Eigen::MatrixXd u = procrustes_basis(s);
  Eigen::Matrix2d expected;
  expected << 0, 1, 1, 0;
  CHECK(u.isApprox(expected, 1e-12));
  CHECK((s * u).trace() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("procrustes_basis attains the nuclear norm and beats random bases") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index m = 3 + rep % 5;
    const Eigen::Index k = 1 + rep % static_cast<int>(m);
    const auto s = testing::random_matrix(m, k, rng);
    const Eigen::MatrixXd u = procrustes_basis(s);
    CHECK(u.rows() == k);
    CHECK(u.cols() == m);
    CHECK(orthonormality_error(u) < 1e-12);
    const double best = (s * u).trace();
    const double nuclear = Eigen::JacobiSVD<Eigen::MatrixXd>(s).singularValues().sum();
    CHECK(best == doctest::Approx(nuclear).epsilon(1e-10));
    for (int draw = 0; draw < 100; ++draw) {
      const auto other = testing::random_row_orthonormal(k, m, rng);
      CHECK((s * other).trace() <= best + 1e-10);
    }
  }
}

TEST_CASE("procrustes_basis on rank-deficient input stays orthonormal") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(5, 3);
  s(0, 0) = 2.0;
  s(1, 1) = 1.0;
  const Eigen::MatrixXd u = procrustes_basis(s);
  CHECK(orthonormality_error(u) < 1e-12);
  CHECK((s * u).trace() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(orthonormality_error(procrustes_basis(Eigen::MatrixXd::Zero(4, 2))) < 1e-12);
  CHECK_THROWS_AS(procrustes_basis(Eigen::MatrixXd::Ones(2, 3)), std::invalid_argument);
}

TEST_CASE("update_representation matches closed forms and a coordinate-search oracle") {
  std::mt19937_64 rng(4);
  const auto data = testing::random_dataset(4, {3, 2}, {5, 4}, rng);
  const auto params = small_params(2);
  const auto graphs = build_graphs(data, params);
  const auto state = init_state(data, params);
  const auto index = index_matrix(data, 0);
  const Eigen::MatrixXd& x = data.view(0);
  const Eigen::MatrixXd w = graphs[0].weights;
  const Eigen::MatrixXd& u = state.bases[0];

  SUBCASE("no sparsity gives the plain ratio") {
    const auto p = update_representation(x, graphs[0], index, state.consensus, u, 2.0, 0.0);
    const auto aux = auxiliary_factors(x, graphs[0], index, state.consensus, u, 2.0);
    const Eigen::MatrixXd expected = (w * x * u.transpose() + 2.0 * index.embed(state.consensus));
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double scale = w.row(i).sum() + (i < 4 ? 2.0 : 0.0);
      CHECK(aux.scales(i) == doctest::Approx(scale));
      CHECK(p.row(i).isApprox(expected.row(i) / scale, 1e-12));
    }
  }

  SUBCASE("huge sparsity weight gives zeros") {
    const auto p = update_representation(x, graphs[0], index, state.consensus, u, 2.0, 1e12);
    CHECK(p.isZero(0.0));
  }

  SUBCASE("each coordinate is the minimizer of its row objective") {
    for (double lambda2 : {0.0, 0.3, 3.0}) {
      const auto p = update_representation(x, graphs[0], index, state.consensus, u, 2.0, lambda2);
      for (Eigen::Index j = 0; j < p.rows(); ++j) {
        const Eigen::RowVectorXd pc = j < 4 ? Eigen::RowVectorXd(state.consensus.row(j)) : Eigen::RowVectorXd();
        for (Eigen::Index c = 0; c < p.cols(); ++c) {
          auto f = [&](double value) {
            Eigen::RowVectorXd row = p.row(j);
            row(c) = value;
            return oracle::row_objective(x, w, u, j, row, j < 4 ? &pc : nullptr, 2.0, lambda2);
          };
          const double found = oracle::golden_section(f, p(j, c) - 10.0, p(j, c) + 10.0);
          CHECK(found == doctest::Approx(p(j, c)).epsilon(1e-6).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("update_representation reports an isolated row") {
  NeighborGraph graph;
  graph.weights.resize(2, 2);
  graph.degrees = Eigen::VectorXd::Zero(2);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(2, 2);
  const IndexMatrix index(0, 2);
  CHECK_THROWS_AS(update_representation(x, graph, index, Eigen::MatrixXd(0, 1), Eigen::MatrixXd::Identity(1, 2), 1.0, 0.0),
                  std::runtime_error);
}

TEST_CASE("update_consensus is the mean and a stationary point") {
  std::mt19937_64 rng(5);
  const auto data = testing::random_dataset(6, {1, 2, 0}, {4, 5, 3}, rng);
  const auto params = small_params(2);
  const auto graphs = build_graphs(data, params);
  auto state = init_state(data, params);
  std::vector<Eigen::MatrixXd> blocks;
  for (std::size_t k = 0; k < 3; ++k) blocks.push_back(index_matrix(data, k).select(state.representations[k]));
  state.consensus = update_consensus(blocks);
  CHECK(state.consensus.isApprox((blocks[0] + blocks[1] + blocks[2]) / 3.0));
  for (Eigen::Index i = 0; i < state.consensus.rows(); ++i) {
    for (Eigen::Index c = 0; c < state.consensus.cols(); ++c) {
      auto shifted = state;
      shifted.consensus(i, c) += 0.5;
      const double up = objective(data, graphs, shifted, params).total();
      shifted.consensus(i, c) -= 1.0;
      const double down = objective(data, graphs, shifted, params).total();
      CHECK(std::abs(up - down) / 1.0 < 1e-10 * std::max(1.0, std::abs(up)));
    }
  }
  CHECK_THROWS_AS(update_consensus({}), std::invalid_argument);
  CHECK_THROWS_AS(update_consensus({Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 2)}), std::invalid_argument);
}

TEST_CASE("objective forms agree") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 5; ++rep) {
    const auto data = testing::random_dataset(5, {2, 3}, {6, 4}, rng);
    const auto params = small_params(3, static_cast<std::uint64_t>(rep));
    const auto graphs = build_graphs(data, params);
    const auto state = init_state(data, params);
    const auto terms = objective(data, graphs, state, params);
    double recon = 0.0, trace_form = 0.0, consensus = 0.0, l1 = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
      const Eigen::MatrixXd w = graphs[k].weights;
      recon += oracle::pairwise_reconstruction(data.view(k), w, state.representations[k], state.bases[k]);
      trace_form += oracle::trace_form_reconstruction(data.view(k), w, state.representations[k], state.bases[k]);
      consensus += (state.representations[k].topRows(5) - state.consensus).squaredNorm();
      l1 += state.representations[k].cwiseAbs().sum();
    }
    CHECK(terms.reconstruction == doctest::Approx(recon).epsilon(1e-10));
    CHECK(trace_form == doctest::Approx(recon).epsilon(1e-8));
    CHECK(terms.consensus == doctest::Approx(params.lambda1 * consensus).epsilon(1e-12));
    CHECK(terms.sparsity == doctest::Approx(params.lambda2 * l1).epsilon(1e-12));
    CHECK(working_objective(data, graphs, state, params) + data_constant(data, graphs) ==
          doctest::Approx(terms.total()).epsilon(1e-10));
  }
}

TEST_CASE("fit decreases the objective at every sub-update and converges on blobs") {
  BlobSpec spec;
  spec.samples = 90;
  spec.seed = 4;
  const auto complete = make_blobs(spec);
  const auto data = make_incomplete_split(complete, {0.5, 9, Rounding::nearest});
  ModelParams params;
  params.latent_dim = 3;
  params.seed = 2;
  const auto graphs = build_graphs(data, params);
  double last = std::numeric_limits<double>::infinity();
  std::size_t calls = 0;
  bool monotone = true;
  const auto state = fit(data, graphs, params, [&](FitStep, std::size_t, const ModelState& s) {
    const double f = objective(data, graphs, s, params).total();
    monotone = monotone && f <= last + 1e-9 * std::abs(last);
    last = f;
    ++calls;
  });
  CHECK(monotone);
  CHECK(calls == state.iterations() * 5);
  CHECK(state.converged);
  CHECK(state.iterations() < params.max_iter);
  CHECK(state.trace.front().total() <= state.initial.total());
  for (std::size_t t = 1; t < state.trace.size(); ++t)
    CHECK(state.trace[t].total() <= state.trace[t - 1].total() * (1 + 1e-12));
  for (const auto& u : state.bases) CHECK(orthonormality_error(u) < 1e-10);
}

TEST_CASE("fit with infinite tolerance stops after one sweep; max_iter caps sweeps") {
  std::mt19937_64 rng(7);
  const auto data = testing::random_dataset(8, {3, 3}, {5, 4}, rng);
  auto params = small_params(2);
  params.tol = std::numeric_limits<double>::infinity();
  CHECK(fit(data, params).iterations() == 1);
  params = small_params(2);
  params.tol = 1e-300;
  params.max_iter = 4;
  const auto state = fit(data, params);
  CHECK(state.iterations() == 4);
  CHECK_FALSE(state.converged);
}

TEST_CASE("fit is deterministic in the seed") {
  std::mt19937_64 rng(8);
  const auto data = testing::random_dataset(6, {2, 2}, {5, 4}, rng);
  const auto a = fit(data, small_params(2, 11));
  const auto b = fit(data, small_params(2, 11));
  CHECK(a.consensus == b.consensus);
  CHECK(a.iterations() == b.iterations());
}

TEST_CASE("assemble_representation, projection and recovery") {
  std::mt19937_64 rng(9);
  const auto data = testing::random_dataset(4, {2, 3}, {5, 4}, rng);
  const auto state = fit(data, small_params(2));
  const auto z = assemble_representation(state, data);
  CHECK(z.rows() == 9);
  CHECK(z.topRows(4) == state.consensus);
  CHECK(z.middleRows(4, 2) == state.representations[0].bottomRows(2));
  CHECK(z.bottomRows(3) == state.representations[1].bottomRows(3));

  const Eigen::VectorXd p = Eigen::Vector2d(0.3, -1.2);
  const auto x = recover_view(p, state.bases[0]);
  CHECK(x.size() == 5);
  CHECK(project_sample(x, state.bases[0]).isApprox(p, 1e-12));
  CHECK_THROWS_AS(project_sample(Eigen::VectorXd::Zero(4), state.bases[0]), std::invalid_argument);
  CHECK_THROWS_AS(recover_view(Eigen::VectorXd::Zero(3), state.bases[0]), std::invalid_argument);
}

TEST_CASE("single-sample views and complete data are handled") {
  std::mt19937_64 rng(10);
  const auto data = testing::random_dataset(0, {1, 5}, {3, 3}, rng);
  const auto state = fit(data, small_params(1));
  CHECK(state.consensus.rows() == 0);
  const auto complete = testing::random_dataset(7, {0, 0}, {3, 4}, rng);
  CHECK(fit(complete, small_params(2)).iterations() >= 1);
}

TEST_CASE("model round trip through a directory") {
  std::mt19937_64 rng(11);
  const auto data = testing::random_dataset(5, {2, 1}, {4, 3}, rng);
  auto params = small_params(2, 99);
  params.lambda2 = 0.125;
  const auto state = fit(data, params);
  testing::TempDir dir("model");
  save_model(state, params, dir.path());
  const auto loaded = load_model(dir.path());
  CHECK(loaded.params.lambda2 == 0.125);
  CHECK(loaded.params.seed == 99);
  CHECK(loaded.params.neighbors == params.neighbors);
  CHECK(loaded.state.consensus == state.consensus);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(loaded.state.bases[k] == state.bases[k]);
    CHECK(loaded.state.representations[k] == state.representations[k]);
  }
  REQUIRE(loaded.state.trace.size() == state.trace.size());
  CHECK(loaded.state.trace.back().total() == state.trace.back().total());
  CHECK(loaded.state.converged == state.converged);
}
