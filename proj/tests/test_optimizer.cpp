#include <doctest.h>

#include <cmath>
#include <vector>

#include "tldc/optimizer.hpp"
#include "test_support.hpp"

using namespace tldc;
using namespace testsup;

TEST_SUITE("optimizer") {

TEST_CASE("config defaults and validation") {
    OptimizerConfig cfg;
    CHECK(cfg.alpha == doctest::Approx(0.001));
    CHECK(cfg.beta1 == doctest::Approx(0.9));
    CHECK(cfg.beta2 == doctest::Approx(0.999));
    CHECK(cfg.epsilon == doctest::Approx(1e-8));
    CHECK_NOTHROW(cfg.validate());

    OptimizerConfig bad = cfg;
    bad.alpha = -0.1;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = cfg;
    bad.beta1 = 1.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = cfg;
    bad.beta2 = -0.01;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = cfg;
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("zero gradient leaves parameters unchanged") {
    Adam adam{OptimizerConfig{}};
    Tensor theta({3}, {1.0f, -2.0f, 3.0f});
    Tensor g({3});
    for (int i = 0; i < 5; ++i) adam.step({&theta}, {&g});
    CHECK(theta[0] == 1.0f);
    CHECK(theta[1] == -2.0f);
    CHECK(theta[2] == 3.0f);
}

TEST_CASE("first step moves by almost exactly alpha against the gradient") {
    // After one step both bias corrections cancel the decay factors, so the
    // update collapses to alpha * g / (|g| + eps) whatever the gradient is.
    AdamT<double> adam{OptimizerConfig{}};
    TensorT<double> theta({1}, {0.0});
    TensorT<double> g({1}, {1.0});
    adam.step({&theta}, {&g});
    CHECK(theta[0] == doctest::Approx(-0.001 / (1.0 + 1e-8)).epsilon(1e-14));
    CHECK(theta[0] == doctest::Approx(-0.000999999).epsilon(1e-6));

    AdamT<double> adam2{OptimizerConfig{}};
    TensorT<double> t2({2}, {0.5, -0.5});
    TensorT<double> g2({2}, {100.0, -0.001});
    adam2.step({&t2}, {&g2});
    CHECK(t2[0] == doctest::Approx(0.5 - 0.001 * 100.0 / (100.0 + 1e-8)).epsilon(1e-12));
    CHECK(t2[1] == doctest::Approx(-0.5 + 0.001 * 0.001 / (0.001 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("matches an independent scalar recurrence over many steps") {
    OptimizerConfig cfg;
    cfg.alpha = 0.01;
    TensorT<double> theta({1}, {0.3});
    TensorT<double> grad({1});
    AdamT<double> opt{cfg};

    // reference state advanced with the textbook update rule
    double ref = 0.3, m = 0, v = 0;
    for (int t = 1; t <= 100; ++t) {
        const double g = 2.0 * ref;  // d(theta^2)/dtheta, evaluated at the reference
        grad[0] = 2.0 * theta[0];
        opt.step({&theta}, {&grad});

        m = cfg.beta1 * m + (1 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1 - cfg.beta2) * g * g;
        const double mhat = m / (1 - std::pow(cfg.beta1, t));
        const double vhat = v / (1 - std::pow(cfg.beta2, t));
        ref -= cfg.alpha * mhat / (std::sqrt(vhat) + cfg.epsilon);

        REQUIRE(theta[0] == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("descends a quadratic bowl") {
    OptimizerConfig cfg;
    cfg.alpha = 0.1;
    AdamT<double> adam{cfg};
    TensorT<double> theta({1}, {3.0});
    TensorT<double> grad({1});
    for (int t = 0; t < 200; ++t) {
        grad[0] = 2.0 * theta[0];
        adam.step({&theta}, {&grad});
    }
    CHECK(std::abs(theta[0]) < 0.05);
}

TEST_CASE("alpha zero freezes parameters bit for bit") {
    OptimizerConfig cfg;
    cfg.alpha = 0.0;
    CHECK_NOTHROW(cfg.validate());
    Adam adam{cfg};
    Tensor theta({4}, {0.1f, -0.2f, 0.3f, -0.4f});
    Tensor copy = theta;
    Tensor g({4}, {5, -5, 5, -5});
    for (int t = 0; t < 20; ++t) adam.step({&theta}, {&g});
    for (std::size_t i = 0; i < 4; ++i) CHECK(theta[i] == copy[i]);
}

TEST_CASE("moment state mirrors parameter shapes lazily") {
    Adam adam{OptimizerConfig{}};
    CHECK(adam.steps() == 0);
    Tensor a({2, 3}), b({4});
    Tensor ga = Tensor::full({2, 3}, 1.0f), gb = Tensor::full({4}, 1.0f);
    adam.step({&a, &b}, {&ga, &gb});
    CHECK(adam.steps() == 1);
    REQUIRE(adam.first_moments().size() == 2);
    CHECK(adam.first_moments()[0].same_shape(a));
    CHECK(adam.first_moments()[1].same_shape(b));
    CHECK(adam.second_moments()[0].same_shape(a));
    CHECK(adam.second_moments()[1].same_shape(b));
}

TEST_CASE("mismatched shapes raise") {
    Adam adam{OptimizerConfig{}};
    Tensor theta({2});
    Tensor g({3});
    CHECK_THROWS_AS(adam.step({&theta}, {&g}), DimensionError);

    // count mismatch
    Tensor g2({2});
    CHECK_THROWS_AS(adam.step({&theta}, {&g2, &g2}), DimensionError);
}

TEST_CASE("state keyed per tensor across steps") {
    // Two tensors with different gradient histories must keep separate
    // moments: updating one must not disturb the other's trajectory.
    OptimizerConfig cfg;
    cfg.alpha = 0.05;
    AdamT<double> joint{cfg}, solo{cfg};

    TensorT<double> a1({1}, {1.0}), b1({1}, {-1.0});
    TensorT<double> a2({1}, {1.0});
    for (int t = 0; t < 25; ++t) {
        TensorT<double> ga({1}, {2.0 * a1[0]});
        TensorT<double> gb({1}, {-3.0});
        joint.step({&a1, &b1}, {&ga, &gb});

        TensorT<double> ga2({1}, {2.0 * a2[0]});
        solo.step({&a2}, {&ga2});
    }
    CHECK(a1[0] == doctest::Approx(a2[0]).epsilon(1e-12));
}

}
