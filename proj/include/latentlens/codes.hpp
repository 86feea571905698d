#ifndef LATENTLENS_CODES_HPP
#define LATENTLENS_CODES_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "latentlens/corpus.hpp"
#include "latentlens/errors.hpp"
#include "latentlens/format.hpp"

namespace latentlens {

// Simplex weight vector over the fixed category order
// [neutral, amusement, anger, disgust, sleepiness]. At most two entries are
// non-zero and one of them is the neutral slot.
struct EmotionCode {
  std::array<double, 5> weights{};

  double weight(Emotion e) const { return weights[std::size_t(e)]; }
};

inline EmotionCode one_hot_code(Emotion category) {
  EmotionCode code;
  code.weights[std::size_t(category)] = 1.0;
  return code;
}

inline EmotionCode one_hot_code(const std::string& category) {
  return one_hot_code(parse_emotion(category));
}

// weight(category) = intensity, weight(neutral) = 1 - intensity.
inline EmotionCode interpolated_code(Emotion category, double intensity) {
  if (category == Emotion::neutral)
    throw InvalidTarget("interpolation target must not be neutral; use a one-hot code");
  if (!(intensity >= 0.0 && intensity <= 1.0))
    throw OutOfRange("intensity must be in [0, 1]");
  EmotionCode code;
  code.weights[std::size_t(Emotion::neutral)] = 1.0 - intensity;
  code.weights[std::size_t(category)] = intensity;
  return code;
}

inline void validate_code(const EmotionCode& code, double sum_tol = 1e-6) {
  double sum = 0.0;
  std::size_t non_zero = 0, non_neutral = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    const double w = code.weights[i];
    if (!(w >= 0.0)) throw NotSimplex("negative or non-finite entry");
    sum += w;
    if (w > 0.0) {
      ++non_zero;
      if (i != std::size_t(Emotion::neutral)) ++non_neutral;
    }
  }
  if (std::fabs(sum - 1.0) > sum_tol) throw NotSimplex("weights sum to " + format_double(sum));
  if (non_neutral > 1) throw RuleViolation("two non-neutral categories are non-zero");
  if (non_zero > 2) throw RuleViolation("more than two non-zero entries");
}

// Accepts either five comma-separated numbers in the fixed category order or
// the shorthand "category:intensity".
inline EmotionCode parse_code(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon != std::string::npos && text.find(',') == std::string::npos) {
    const std::string category = text.substr(0, colon);
    double intensity;
    try {
      intensity = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw ParseError("bad intensity in code: " + text);
    }
    const Emotion e = parse_emotion(category);
    const EmotionCode code = e == Emotion::neutral && intensity == 1.0
                                 ? one_hot_code(e)
                                 : interpolated_code(e, intensity);
    validate_code(code);
    return code;
  }

  const auto cells = split_csv_line(text);
  if (cells.size() != 5) throw ParseError("expected 5 comma-separated weights");
  EmotionCode code;
  for (std::size_t i = 0; i < 5; ++i) {
    try {
      code.weights[i] = std::stod(cells[i]);
    } catch (const std::exception&) {
      throw ParseError("bad weight: " + cells[i]);
    }
  }
  validate_code(code);
  return code;
}

// JSON array in fixed category order, e.g. [0.7, 0.3, 0, 0, 0].
inline std::string code_to_json(const EmotionCode& code) {
  std::string out = "[";
  for (std::size_t i = 0; i < 5; ++i) {
    if (i) out += ", ";
    out += format_double(code.weights[i]);
  }
  out += "]";
  return out;
}

}  // namespace latentlens

#endif
