#include "imcgrmf/baselines.hpp"
#include "imcgrmf/synthetic.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace imcgrmf;

TEST_CASE("mean_fill imputes the observed mean") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 3, 3, 5;
  Eigen::MatrixXd b(1, 1);
  b << 7;
  const MultiViewDataset data({a, b}, 0);
  const auto filled = mean_fill(data);
  REQUIRE(filled.views[0].rows() == 3);
  CHECK(filled.views[0].row(0) == a.row(0));
  CHECK(filled.views[0].row(1) == a.row(1));
  CHECK(filled.views[0].row(2) == Eigen::RowVector2d(2, 4));
  CHECK(filled.observed[0] == std::vector<bool>{true, true, false});
  CHECK(filled.views[1].col(0) == Eigen::Vector3d(7, 7, 7));
  CHECK(filled.observed[1] == std::vector<bool>{false, false, true});
}

TEST_CASE("mean_fill on equal rows, complete data and repeated application") {
  Eigen::MatrixXd a(2, 2);
  a << 4, 4, 4, 4;
  const MultiViewDataset equal({a, Eigen::MatrixXd::Ones(3, 1)}, 1);
  CHECK(mean_fill(equal).views[0].row(2) == Eigen::RowVector2d(4, 4));

  std::mt19937_64 rng(1);
  const auto complete = testing::random_dataset(6, {0, 0}, {3, 2}, rng);
  const auto same = mean_fill(complete);
  CHECK(same.views[0] == complete.view(0));
  CHECK(same.views[1] == complete.view(1));

  const auto data = testing::random_dataset(3, {2, 4}, {3, 2}, rng);
  const auto once = mean_fill(data);
  const auto twice = mean_fill(once.as_complete());
  CHECK(twice.views[0].isApprox(once.views[0], 1e-15));
  CHECK(twice.views[1].isApprox(once.views[1], 1e-15));
  CHECK(once.views[0].cols() + once.views[1].cols() == 5);
}

TEST_CASE("bsv picks the informative view") {
  BlobSpec spec;
  spec.samples = 60;
  spec.view_dims = {4, 4};
  spec.seed = 3;
  const auto blobs = make_blobs(spec);
  std::mt19937_64 rng(2);
  const MultiViewDataset data({testing::random_matrix(60, 4, rng), blobs.view(1)}, 60, blobs.labels());
  const auto result = bsv_cluster(data, {3, 10, 300, 0});
  CHECK(result.best_view == 1);
  CHECK(result.view_scores.size() == 2);
  CHECK(result.view_scores[1].acc == 1.0);
  CHECK(result.view_scores[0].acc < 1.0);
  CHECK(result.labels == result.view_labels[1]);
  CHECK_FALSE(result.labels_missing);
}

TEST_CASE("bsv tie goes to the first view; missing labels are flagged") {
  std::mt19937_64 rng(3);
  const auto x = testing::random_matrix(20, 3, rng);
  std::vector<int> truth(20);
  for (std::size_t i = 0; i < 20; ++i) truth[i] = static_cast<int>(i % 2);
  const auto tied = bsv_cluster(MultiViewDataset({x, x}, 20, truth), {2, 5, 300, 1});
  CHECK(tied.best_view == 0);
  CHECK(tied.view_scores[0].acc == tied.view_scores[1].acc);

  const auto unlabeled = bsv_cluster(MultiViewDataset({x, x}, 20), {2, 5, 300, 1});
  CHECK(unlabeled.labels_missing);
  CHECK(unlabeled.best_view == 0);
  CHECK(unlabeled.view_scores.empty());

  const auto single = bsv_cluster(MultiViewDataset({x, x}, 20, std::vector<int>(20, 0)), {1, 2, 300, 0});
  CHECK(score(single.labels, std::vector<int>(20, 0)).acc == 1.0);
}

TEST_CASE("concat clusters duplicated separated views perfectly and keeps row order") {
  BlobSpec spec;
  spec.samples = 90;
  spec.view_dims = {2, 3};
  spec.seed = 5;
  const auto blobs = make_blobs(spec);
  const auto labels = concat_cluster(blobs, {3, 20, 300, 0});
  REQUIRE(labels.size() == 90);
  CHECK(accuracy(labels, *blobs.labels()) == 1.0);

  const MultiViewDataset doubled({blobs.view(0), blobs.view(0)}, 90, blobs.labels());
  CHECK(accuracy(concat_cluster(doubled, {3, 20, 300, 0}), *blobs.labels()) == 1.0);
}

TEST_CASE("baselines on complete data reduce to plain k-means") {
  std::mt19937_64 rng(4);
  const auto data = testing::random_dataset(25, {0, 0}, {3, 2}, rng);
  const KMeansParams params{3, 4, 300, 8};
  const auto bsv = bsv_cluster(data, params);
  CHECK(bsv.view_labels[0] == kmeans(data.view(0), params).labels);
  CHECK(bsv.view_labels[1] == kmeans(data.view(1), params).labels);
  Eigen::MatrixXd joined(25, 5);
  joined << data.view(0), data.view(1);
  CHECK(concat_cluster(data, params) == kmeans(joined, params).labels);
}
