#include "gmf/gaussmix.hpp"

#include <cmath>
#include <stdexcept>

namespace gmf {

namespace {

// 20-point Gauss-Hermite rule for weight exp(-x^2), nodes symmetric about 0.
// Values computed with 40-digit arithmetic (Newton on H_20 with exact
// rational coefficients) and rounded to double.
constexpr int kNodes = 20;

constexpr double kGhNodes[kNodes] = {
    -5.387480890011232862016900410681121,
    -4.603682449550744273077675248978348,
    -3.944764040115625210375628800524412,
    -3.347854567383216326914924522996464,
    -2.788806058428130480525033756403185,
    -2.254974002089275523082333344734565,
    -1.738537712116586206780865662136406,
    -1.234076215395323007885818346959410,
    -0.7374737285453943587056051442521042,
    -0.2453407083009012499038365306336166,
    0.2453407083009012499038365306336166,
    0.7374737285453943587056051442521042,
    1.234076215395323007885818346959410,
    1.738537712116586206780865662136406,
    2.254974002089275523082333344734565,
    2.788806058428130480525033756403185,
    3.347854567383216326914924522996464,
    3.944764040115625210375628800524412,
    4.603682449550744273077675248978348,
    5.387480890011232862016900410681121,
};

constexpr double kGhWeights[kNodes] = {
    2.229393645534151292522500616029096e-13,
    4.399340992273180553628851455467928e-10,
    1.086069370769281693999524563447163e-7,
    7.802556478532063694145991999647569e-6,
    2.283386360163539672571459179634955e-4,
    3.243773342237861832183247132353705e-3,
    2.481052088746361088216495255894039e-2,
    1.090172060200233200137550335354256e-1,
    2.866755053628341297196597062280879e-1,
    4.622436696006100896503286398612081e-1,
    4.622436696006100896503286398612081e-1,
    2.866755053628341297196597062280879e-1,
    1.090172060200233200137550335354256e-1,
    2.481052088746361088216495255894039e-2,
    3.243773342237861832183247132353705e-3,
    2.283386360163539672571459179634955e-4,
    7.802556478532063694145991999647569e-6,
    1.086069370769281693999524563447163e-7,
    4.399340992273180553628851455467928e-10,
    2.229393645534151292522500616029096e-13,
};

// 1/sqrt(pi), normalising the exp(-x^2) weight to a probability density
constexpr double kInvSqrtPi = 0.5641895835477562869480794515607726;

// sqrt(2): substitution y = v + sqrt(2 w) x maps the rule to N(v, w)
constexpr double kSqrt2 = 1.4142135623730950488016887242096981;

}  // namespace

void WeightedMixture::validate() const {
  double sum = 0.0;
  for (const auto& c : components) {
    if (c.weight < 0.0)
      throw std::invalid_argument("mixture weight must be >= 0");
    if (c.measure.variance < 0.0)
      throw std::invalid_argument("negative variance");
    sum += c.weight;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("mixture weights must sum to 1");
}

double gauss_expect_fn(const GaussianMeasure& m,
                       const std::function<double(double)>& f) {
  if (m.variance < 0.0) throw std::invalid_argument("negative variance");
  if (m.variance == 0.0) return f(m.mean);
  const double scale = kSqrt2 * std::sqrt(m.variance);
  double acc = 0.0;
  for (int i = 0; i < kNodes; ++i)
    acc += kGhWeights[i] * f(m.mean + scale * kGhNodes[i]);
  return kInvSqrtPi * acc;
}

double gauss_expect(const GaussianMeasure& m, const TestFunction& phi) {
  if (m.variance < 0.0) throw std::invalid_argument("negative variance");
  if (m.variance == 0.0) return phi(m.mean);
  const double scale = kSqrt2 * std::sqrt(m.variance);
  double acc = 0.0;
  for (int i = 0; i < kNodes; ++i)
    acc += kGhWeights[i] * phi(m.mean + scale * kGhNodes[i]);
  return kInvSqrtPi * acc;
}

double mixture_expect(const WeightedMixture& mix, const TestFunction& phi) {
  double acc = 0.0;
  for (const auto& c : mix.components)
    acc += c.weight * gauss_expect(c.measure, phi);
  return acc;
}

double point_mass_expect(const WeightedMixture& mix, const TestFunction& phi) {
  double acc = 0.0;
  for (const auto& c : mix.components) acc += c.weight * phi(c.measure.mean);
  return acc;
}

std::span<const double> gauss_hermite_nodes() {
  return std::span<const double>(kGhNodes, kNodes);
}

std::span<const double> gauss_hermite_weights() {
  return std::span<const double>(kGhWeights, kNodes);
}

}  // namespace gmf
