#pragma once

#include <stdexcept>
#include <string>

namespace semitcl {

struct DegenerateEmbedding : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateAggregate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyBatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BadLabel : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct NoTracks : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutOfOrderFrame : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BadConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceDetected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownAblation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& message, int line_number)
      : std::runtime_error(message + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  int line;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace semitcl
