#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "expfunc/kernels.hpp"

using namespace expfunc;

TEST_CASE("parallel point evaluation matches the serial reference bit for bit") {
    std::vector<double> xs;
    for (int i = 0; i < 1000; ++i) xs.push_back(0.01 * i);
    auto f = [](double x) { return std::sin(x) * std::exp(-x); };
    CHECK(evaluate_points(f, xs, Exec::serial) == evaluate_points(f, xs, Exec::parallel, 4));
}

TEST_CASE("the first failing point's exception is rethrown") {
    std::vector<double> xs{1, 2, 3, 4};
    auto f = [](double x) -> double {
        if (x >= 3) throw std::runtime_error(x == 3 ? "three" : "four");
        return x;
    };
    CHECK_THROWS_WITH(evaluate_points(f, xs, Exec::parallel, 4), "three");
}

TEST_CASE("lattice convolution is symmetric and matches the serial kernel") {
    std::vector<double> a{1, 2, 3, 0.5}, b{0.25, 4, 1};
    const auto ab = lattice_convolve(a, b, 0.5, Exec::serial);
    CHECK(ab == lattice_convolve(b, a, 0.5, Exec::serial));
    CHECK(ab == lattice_convolve(a, b, 0.5, Exec::parallel, 3));
    REQUIRE(ab.size() == 6);
    CHECK(ab[0] == doctest::Approx(0.125));
    CHECK(ab[1] == doctest::Approx(0.5 * (4 + 0.5)));
}
