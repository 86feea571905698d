#ifndef LATENTLENS_ERRORS_HPP
#define LATENTLENS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace latentlens {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// corpus
struct DuplicateId : Error {
  std::string id;
  explicit DuplicateId(std::string id_)
      : Error("duplicate id: " + id_), id(std::move(id_)) {}
};
struct UnknownCategory : Error {
  explicit UnknownCategory(const std::string& value)
      : Error("unknown emotion category: " + value) {}
  UnknownCategory(std::size_t line, const std::string& value)
      : Error("line " + std::to_string(line) + ": unknown emotion category: " + value) {}
};
struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error("parse error: " + msg) {}
  ParseError(std::size_t line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg) {}
};
struct DimensionMismatch : Error {
  DimensionMismatch(const std::string& id, std::size_t got, std::size_t want)
      : Error("embedding " + id + ": dimension " + std::to_string(got) +
              ", expected " + std::to_string(want)) {}
};
struct NonFinite : Error {
  NonFinite(const std::string& id, std::size_t index)
      : Error("embedding " + id + ": non-finite value at index " + std::to_string(index)) {}
};
struct EmptyJoin : Error {
  EmptyJoin() : Error("no ids common to all inputs") {}
};

// acoustics
struct TooShort : Error {
  TooShort() : Error("buffer shorter than one analysis frame") {}
};
struct UnsupportedFormat : Error {
  explicit UnsupportedFormat(const std::string& msg) : Error("unsupported format: " + msg) {}
};

// projection / interpret / affect
struct TooFewPoints : Error {
  explicit TooFewPoints(const std::string& msg = "too few points") : Error(msg) {}
};
struct DegenerateData : Error {
  DegenerateData() : Error("data has zero variance") {}
};
struct DegenerateGeometry : Error {
  DegenerateGeometry() : Error("projection points are collinear") {}
};
struct ConstantFeature : Error {
  explicit ConstantFeature(const std::string& name)
      : Error("feature has zero variance: " + name) {}
};
struct FlatPlane : Error {
  explicit FlatPlane(const std::string& name)
      : Error("plane gradient is numerically zero: " + name) {}
};

// codes
struct NotSimplex : Error {
  explicit NotSimplex(const std::string& msg) : Error("not a simplex code: " + msg) {}
};
struct RuleViolation : Error {
  explicit RuleViolation(const std::string& msg) : Error("code rule violation: " + msg) {}
};
struct OutOfRange : Error {
  explicit OutOfRange(const std::string& msg) : Error("out of range: " + msg) {}
};
struct InvalidTarget : Error {
  explicit InvalidTarget(const std::string& msg) : Error("invalid target: " + msg) {}
};

}  // namespace latentlens

#endif
