#pragma once

#include "imcgrmf/dataset.hpp"

#include <cstdint>
#include <vector>

namespace imcgrmf {

// Isotropic Gaussian clusters observed through several views. Each view has its
// own cluster centers, scaled so the closest pair of centers is exactly
// `separation * sigma` apart.
struct BlobSpec {
  std::size_t clusters = 3;
  std::size_t samples = 150;
  std::vector<std::size_t> view_dims{10, 8};
  double separation = 6.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
};

// Complete dataset with labels; sample i belongs to cluster i % clusters.
MultiViewDataset make_blobs(const BlobSpec& spec);

}  // namespace imcgrmf
