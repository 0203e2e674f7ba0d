#include <doctest.h>

#include <limits>
#include <stdexcept>

#include "meg/tensor.hpp"

using namespace meg;

TEST_CASE("tensor shape/data invariant") {
  Tensor t({2, 3});
  CHECK(t.numel() == 6);
  CHECK(t.rank() == 2);
  for (double v : t.data) CHECK(v == 0.0);

  CHECK_THROWS_AS(Tensor({2, 2}, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("tensor indexing is row-major") {
  Tensor t({2, 3}, {0, 1, 2, 3, 4, 5});
  CHECK(t(0, 0) == 0);
  CHECK(t(0, 2) == 2);
  CHECK(t(1, 0) == 3);
  CHECK(t(1, 2) == 5);

  Tensor u({2, 2, 2}, {0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(u(1, 0, 1) == 5);
  CHECK(u(0, 1, 0) == 2);
}

TEST_CASE("add and axpy check shapes") {
  Tensor a({3}, {1, 2, 3});
  Tensor b({3}, {10, 20, 30});
  add_inplace(a, b);
  CHECK(a.data == std::vector<double>{11, 22, 33});
  axpy_inplace(a, -1.0, b);
  CHECK(a.data == std::vector<double>{1, 2, 3});

  Tensor wrong({2}, {0, 0});
  CHECK_THROWS_AS(add_inplace(a, wrong), std::invalid_argument);
}

TEST_CASE("all_finite flags NaN and Inf") {
  Tensor t({2}, {1.0, 2.0});
  CHECK(t.all_finite());
  t.data[1] = std::numeric_limits<double>::infinity();
  CHECK_FALSE(t.all_finite());
  t.data[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(t.all_finite());
}
