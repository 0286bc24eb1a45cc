#pragma once

// Plain-text formats for channels, priors, joints and utility tables.
// Writers produce a canonical form (single spaces, shortest round-trip
// decimals, no comments) that the parsers read back to an equal object and
// that re-writes byte-identically.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "chanorder/blackwell.hpp"
#include "chanorder/core.hpp"

namespace chanorder {

// Malformed input, with the 1-based line where it was detected (0 when the
// problem is the file as a whole, e.g. it ended early).
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Shortest decimal that parses back to exactly `x`.
std::string format_number(double x);

Channel parse_channel(std::istream& in, std::string_view source = "<channel>");
ProbVector parse_prior(std::istream& in, std::string_view source = "<prior>");
JointDistribution parse_joint(std::istream& in, std::string_view source = "<joint>");
UtilityTable parse_utility(std::istream& in, std::string_view source = "<utility>");

void write_channel(std::ostream& out, const Channel& c);
void write_prior(std::ostream& out, const ProbVector& p);
// Rows for nonzero masses in index order. `labels` lines are added only when
// first-appearance order in the rows would not reproduce an alphabet.
void write_joint(std::ostream& out, const JointDistribution& j);
void write_utility(std::ostream& out, const UtilityTable& u);

// File helpers; the path doubles as the error source. Unreadable or
// unwritable files raise IoError.
class IoError : public Error {
 public:
  using Error::Error;
};

Channel read_channel_file(const std::filesystem::path& path);
ProbVector read_prior_file(const std::filesystem::path& path);
JointDistribution read_joint_file(const std::filesystem::path& path);
UtilityTable read_utility_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

std::string to_text(const Channel& c);
std::string to_text(const ProbVector& p);
std::string to_text(const JointDistribution& j);
std::string to_text(const UtilityTable& u);

}  // namespace chanorder
