#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "expfunc/io.hpp"
#include "expfunc/levy_model.hpp"

namespace expfunc {

enum class MomentKind { positive_of_IHminus, negative_of_IY, factorized_Ixi };

struct MomentTable {
    MomentKind kind = MomentKind::positive_of_IHminus;
    std::vector<std::pair<int, double>> values;  // (order, moment)
    std::string params;

    double at(int m) const;
};

// E[I_H^m] = m! / prod_{k<=m} (-phi_-(k))
MomentTable moments_H(const LadderExponent& desc, int m_max = 20);
// E[I_Y^{-m}] = k_+ prod_{k<m} psi_+(-k) / Gamma(m)
MomentTable neg_moments_Y(const LadderPair& pair, int m_max = 20);

// E[I_H^s] for real s >= 0 through the product limit of the Bernstein-gamma function.
double fractional_moment_H(const LadderExponent& desc, double s, int terms = 1000);

// r(z) = M(z+1) + z M(z) / Psi(z)
std::vector<double> mellin_recursion_residual(const std::function<double(double)>& M, const LevyModel& model,
                                              const std::vector<double>& z_grid);

struct MellinResidual {
    double z = 0.0;
    double residual = 0.0;
    double standard_error = 0.0;
};
// Sample-mean Mellin transform of a positive sample with bootstrap standard errors.
std::vector<MellinResidual> mc_mellin_residuals(const std::vector<double>& sample, const LevyModel& model,
                                                const std::vector<double>& z_grid, int resamples = 200,
                                                std::uint64_t seed = 7);

// E[(I_H x I_Y)^{-1}] = k_+ (-phi_-'(0+))
double factorized_neg_first_moment(const LadderPair& pair);

// Partial sum of E[I^m]^{-1/(2m)}; diagnostic only.
double carleman_partial_sum(const MomentTable& t);

std::string to_csv(const MomentTable& t);
json to_json(const MomentTable& t);
const char* kind_name(MomentKind k);

}  // namespace expfunc
