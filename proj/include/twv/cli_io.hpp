#pragma once

// The .twv input document (JSON), the built-in figure-eight and Whitehead
// fixtures, text/CSV rendering, and the command implementations behind the
// `twv` executable.  Commands return process exit codes:
//   0 success, 1 mathematical failure, 2 input or schema failure.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "twv/group_words.hpp"
#include "twv/laurent_linalg.hpp"
#include "twv/representations.hpp"
#include "twv/volume_flow.hpp"

namespace twv {

inline constexpr const char* kDocumentFormat = "twv/1";

enum ExitCode : int { kExitOk = 0, kExitMath = 1, kExitInput = 2 };

struct RunConfig {
  int n_min = 4;
  int n_max = 20;
  std::string parity = "both";
  std::string point = "1";
  std::string mode = "ratio";
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Reference values shipped with a fixture.  `source` says where they come
// from: "published table", "closed form", or "derived".
struct ExpectedSeries {
  std::string source;
  std::string sign;
  std::string mode;
  std::string point = "1";
  std::vector<std::pair<int, std::string>> estimators;  // n -> decimal string
  friend bool operator==(const ExpectedSeries&, const ExpectedSeries&) = default;
};

struct InputDocument {
  std::string format = kDocumentFormat;
  std::string name;
  std::string description;
  std::vector<Generator> generators;
  std::vector<std::string> relators;  // as written, e.g. "a b = b a"
  std::vector<int> alpha;             // a(l) per component
  std::vector<Holonomy> holonomies;   // one per branch; at least one
  std::vector<std::string> signs;     // default sign assignments
  std::optional<RunConfig> config;
  std::vector<ExpectedSeries> expected;
};

// Throws InputError on malformed JSON or schema violations.
InputDocument parse_document(const std::string& text);
std::string emit_document(const InputDocument& doc);

// A readable file path, or else the name of a built-in fixture.
InputDocument load_document(const std::string& path_or_name);

// Builds the presentation, alpha and chosen holonomy branch.  Relators that
// reduce to the identity are reported in `warnings`.
Example to_example(const InputDocument& doc, int branch = 0, std::vector<std::string>* warnings = nullptr);

std::vector<std::string> fixture_names();
InputDocument fixture(const std::string& name);  // throws InputError for unknown names

// Shift to lowest exponent 0 and fix the sign so the leading coefficient has
// positive real part (positive imaginary part when the real part vanishes).
LaurentPoly<double> unit_normalized(const LaurentPoly<double>& p);
std::string format_poly(const LaurentPoly<double>& p, int digits = 10);

std::string render_table(const EstimateTable& table);
inline constexpr const char* kCsvHeader = "n,parity,sign,mode,point,modulus_log,estimator,zero_order,runtime_ms,status";
std::string render_csv(const std::vector<EstimateTable>& tables);

struct VerifyOptions {
  std::string input;
  std::vector<int> dims{2};
  std::vector<std::string> signs;  // empty: every assignment
  int branch = 0;
  double tol = 1e-8;
};

struct InvariantOptions {
  std::string input;
  int n = 2;
  std::string signs;  // empty: all +
  int branch = 0;
  std::string print = "poly";  // poly | value
  std::string at = "1";
  std::string precision;       // empty: auto, or TWV_PRECISION
  int digits = 10;
  bool exploratory = false;
};

struct VolumeOptions {
  std::string input;
  std::optional<int> n_min;
  std::optional<int> n_max;
  std::vector<int> n_values;
  std::optional<std::string> parity;
  std::optional<std::string> at;
  std::optional<std::string> mode;
  std::vector<std::string> signs;  // empty: document defaults, "all": every assignment
  int branch = 0;
  bool accelerate = false;
  std::string precision;  // empty: auto, or TWV_PRECISION
  bool certify = false;
  bool exploratory = false;
  std::string csv_path;  // "-" writes CSV to stdout instead of the table
};

struct ExamplesOptions {
  std::string action = "list";  // list | emit
  std::string name;
  std::string output;  // empty: stdout
};

// Precision policy from a flag value, falling back to TWV_PRECISION, then
// to the automatic ladder.  "auto" selects the ladder explicitly.
PrecisionPolicy resolve_precision(const std::string& flag, bool certify);

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err);
int cmd_invariant(const InvariantOptions& o, std::ostream& out, std::ostream& err);
int cmd_volume(const VolumeOptions& o, std::ostream& out, std::ostream& err);
int cmd_examples(const ExamplesOptions& o, std::ostream& out, std::ostream& err);

}  // namespace twv
