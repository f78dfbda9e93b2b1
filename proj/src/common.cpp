#include "homog/common.hpp"

namespace homog {

double pairwise_sum(std::span<const double> v) {
  // recursive halving with a small serial base; fixed association order
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace homog
