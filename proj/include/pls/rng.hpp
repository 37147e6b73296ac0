#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace pls {

/// splitmix64 step; used to derive independent stream seeds from a root
/// seed so parallel replications stay deterministic.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t split_seed(std::uint64_t root, std::uint64_t stream) {
  return splitmix64(root ^ splitmix64(stream + 0x632be59bd9b4e019ull));
}

inline std::mt19937_64 make_rng(std::uint64_t root, std::uint64_t stream) {
  return std::mt19937_64(split_seed(root, stream));
}

inline Eigen::VectorXd gaussian_vector(std::mt19937_64& rng, Eigen::Index n, double sigma = 1.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = sigma * normal(rng);
  return v;
}

}  // namespace pls
