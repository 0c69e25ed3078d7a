#include <doctest.h>

#include <cmath>

#include "bpfl/attacks.hpp"
#include "bpfl/errors.hpp"

using namespace bpfl;

TEST_CASE("add_noise: identity at sigma 0, reproducible, calibrated spread") {
    ModelVector w{0.5, -0.25, 1.0};
    CHECK(add_noise(w, 0.0, 1) == w);
    CHECK(add_noise(w, 1.0, 7) == add_noise(w, 1.0, 7));
    CHECK(add_noise(w, 1.0, 7) != add_noise(w, 1.0, 8));
    CHECK_THROWS_AS(add_noise(w, -1.0, 1), std::invalid_argument);

    // sample-statistics oracle over 1e5 draws
    const double sigma = 0.7;
    ModelVector base(100000, 0.0);
    ModelVector noisy = add_noise(base, sigma, 99);
    double mean = 0, var = 0;
    for (double v : noisy) mean += v;
    mean /= static_cast<double>(noisy.size());
    for (double v : noisy) var += (v - mean) * (v - mean);
    var /= static_cast<double>(noisy.size());
    CHECK(std::fabs(std::sqrt(var) - sigma) / sigma < 0.05);
}

TEST_CASE("sign_flip: negation, involution, antiparallel") {
    ModelVector w{1, -2};
    CHECK(sign_flip(w) == ModelVector{-1, 2});
    CHECK(sign_flip(sign_flip(w)) == w);
    CHECK(cosine_similarity(w, sign_flip(w)) == doctest::Approx(-1.0));
}

TEST_CASE("identical benign models force gamma = 0") {
    std::vector<ModelVector> benign{{1, 2}, {1, 2}, {1, 2}};
    ModelVector out = min_max_attack(benign, Perturbation::NegUnitMean, std::array{1.0, 2.0});
    for (std::size_t j = 0; j < 2; ++j) CHECK(out[j] == doctest::Approx(benign[0][j]).epsilon(1e-3));
    ModelVector out2 = min_sum_attack(benign, Perturbation::NegUnitMean, std::array{1.0});
    for (std::size_t j = 0; j < 2; ++j) CHECK(out2[j] == doctest::Approx(benign[0][j]).epsilon(1e-3));
}

TEST_CASE("min-max gamma matches closed-form geometry for two benign models") {
    // two models at distance D = 2 whose mean lies orthogonal to their
    // difference: the crafted point sits at distance sqrt((D/2)^2 + gamma^2)
    // from both, so the largest feasible gamma solves that = D: sqrt(3)/2 * D
    std::vector<ModelVector> arranged{{-1, 3, 0}, {1, 3, 0}};
    const double dist = 2.0;
    double gamma = attack_gamma(arranged, Perturbation::NegUnitMean, std::array{1.0, 2.0}, false);
    CHECK(gamma == doctest::Approx(std::sqrt(3.0) / 2.0 * dist).epsilon(1e-2));

    // exhaustive sweep oracle at 1e-4 resolution
    auto feasible = [&](double g) {
        ModelVector m{0, 3 - g, 0};
        double worst = 0;
        for (const auto& b : arranged) {
            double acc = 0;
            for (std::size_t j = 0; j < 3; ++j) acc += (m[j] - b[j]) * (m[j] - b[j]);
            worst = std::max(worst, acc);
        }
        return worst <= dist * dist + 1e-12;
    };
    double sweep_best = 0;
    for (double g = 0; g < 4.0; g += 1e-4) {
        if (feasible(g)) sweep_best = g;
    }
    CHECK(std::fabs(gamma - sweep_best) < 5e-3);
}

TEST_CASE("attack outputs satisfy their own feasibility constraint when recomputed") {
    Rng rng(404);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 3 + rng.below(5);
        std::vector<ModelVector> benign(n, ModelVector(4));
        for (auto& m : benign)
            for (double& v : m) v = rng.normal(0.5, 0.3);
        for (bool min_sum : {false, true}) {
            ModelVector crafted = min_sum
                                      ? min_sum_attack(benign, Perturbation::NegUnitMean,
                                                       std::array{0.5, 1.0, 4.0})
                                      : min_max_attack(benign, Perturbation::NegUnitMean,
                                                       std::array{0.5, 1.0, 4.0});
            auto sq = [&](const ModelVector& a, const ModelVector& b) {
                double s = 0;
                for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
                return s;
            };
            if (min_sum) {
                double total = 0, bound = 0;
                for (const auto& b : benign) total += sq(crafted, b);
                for (const auto& a : benign) {
                    double t = 0;
                    for (const auto& b : benign) t += sq(a, b);
                    bound = std::max(bound, t);
                }
                CHECK(total <= bound + 1e-6);
            } else {
                double worst = 0, bound = 0;
                for (const auto& b : benign) worst = std::max(worst, sq(crafted, b));
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = i + 1; j < n; ++j)
                        bound = std::max(bound, sq(benign[i], benign[j]));
                CHECK(worst <= bound + 1e-6);
            }
        }
    }
}

TEST_CASE("perturbation directions and grid validation") {
    std::vector<ModelVector> benign{{1, -1}, {3, -3}};
    CHECK_THROWS_AS(min_max_attack(benign, Perturbation::NegUnitMean, {}), ConfigError);
    std::vector<ModelVector> single{{1, 1}};
    CHECK_THROWS_AS(min_max_attack(single, Perturbation::NegUnitMean, std::array{1.0}),
                    ConfigError);
    // NegSign flips against the mean's signs
    ModelVector crafted = min_max_attack(benign, Perturbation::NegSign, std::array{0.5});
    CHECK(crafted[0] < 2.0);  // pushed down from mean 2
    CHECK(crafted[1] > -2.0); // pushed up from mean -2
}

TEST_CASE("attack spec: malicious id selection and threat-model bound") {
    AttackSpec spec;
    spec.variant = AttackVariant::SignFlip;
    spec.fraction = 0.2;
    CHECK(spec.malicious_count(20) == 4);
    CHECK(spec.is_malicious(17, 20));
    CHECK(spec.is_malicious(20, 20));
    CHECK_FALSE(spec.is_malicious(16, 20));
    CHECK_FALSE(spec.is_malicious(1, 20));
    AttackSpec none;
    CHECK_FALSE(none.is_malicious(20, 20));
}
