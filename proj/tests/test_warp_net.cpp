#include <doctest.h>

#include <random>

#include "nsgp/errors.hpp"
#include "nsgp/warp_net.hpp"

using nsgp::WarpNet;

TEST_CASE("zero-initialized net maps everything to zero") {
  WarpNet net({2, 4, 2});
  Eigen::VectorXd x(2);
  x << 1.5, -0.7;
  CHECK(net.forward(x).isZero(0.0));
}

TEST_CASE("single identity layer is transparent on positive inputs") {
  WarpNet net({2, 2});
  net.weight(0) = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd x(2);
  x << 0.3, 1.1;
  CHECK((net.forward(x) - x).norm() == 0.0);
}

TEST_CASE("hand-computed 1-2-1 forward pass") {
  WarpNet net({1, 2, 1});
  net.weight(0) << 2.0, -3.0;
  net.bias(0) << 0.5, 0.25;
  net.weight(1) << 1.0, -2.0;
  net.bias(1) << 0.1;
  Eigen::VectorXd x(1);
  x << 0.3;
  // pre-activations (1.1, -0.65), ReLU keeps (1.1, 0), output 1.1 + 0.1
  CHECK(net.forward(x)[0] == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("pack/unpack roundtrip is bit-identical") {
  const std::vector<int> widths{3, 5, 4, 3};
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Eigen::VectorXd flat(WarpNet::parameter_count(widths));
  for (Eigen::Index i = 0; i < flat.size(); ++i) flat[i] = u(rng);

  const WarpNet net = WarpNet::unpack(widths, flat);
  const Eigen::VectorXd repacked = net.pack();
  REQUIRE(repacked.size() == flat.size());
  for (Eigen::Index i = 0; i < flat.size(); ++i) CHECK(repacked[i] == flat[i]);
}

TEST_CASE("parameter counts for the reference shapes") {
  CHECK(WarpNet::parameter_count({1, 5, 5, 1}) == 46);
  CHECK(WarpNet::parameter_count({3, 10, 10, 3}) == 183);
  CHECK(WarpNet::parameter_count({1, 2, 1}) == 7);
}

TEST_CASE("forward scales linearly while pre-activations stay positive") {
  WarpNet net({1, 3, 1});
  net.weight(0) << 1.0, 2.0, 0.5;
  net.weight(1) << 1.0, 1.0, 1.0;
  // biases zero, so positive inputs keep every unit active
  Eigen::VectorXd x(1);
  x << 0.4;
  const double base = net.forward(x)[0];
  for (double alpha : {0.5, 2.0, 3.5}) {
    Eigen::VectorXd xs = alpha * x;
    CHECK(net.forward(xs)[0] == doctest::Approx(alpha * base).epsilon(1e-12));
  }
}

TEST_CASE("unpack rejects wrong-length vectors") {
  CHECK_THROWS_AS(WarpNet::unpack({1, 5, 5, 1}, Eigen::VectorXd::Zero(45)),
                  nsgp::DimensionError);
  CHECK_THROWS_AS(WarpNet({3}), nsgp::DimensionError);
}

TEST_CASE("forward rejects wrong input dimension") {
  WarpNet net({2, 2});
  CHECK_THROWS_AS(net.forward(Eigen::VectorXd::Zero(3)), nsgp::DimensionError);
}
