#include "twv/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "twv/errors.hpp"
#include "twv/scalar.hpp"
#include "twv/wada_engine.hpp"

namespace twv {

using json = nlohmann::ordered_json;

namespace {

std::string printf_string(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

// ---------------------------------------------------------------------------
// Document parsing

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) schema_error(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      schema_error(where, "unknown key '" + key + "'");
    }
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) schema_error(where, std::string("missing key '") + key + "'");
  return j.at(key);
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) schema_error(where, "expected a string");
  return j.get<std::string>();
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) schema_error(where, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    schema_error(where, "integer out of range");
  }
  return static_cast<int>(v);
}

// Decimal strings are kept verbatim; JSON numbers are accepted and turned into
// their shortest round-trip spelling.
std::string get_decimal(const json& j, const std::string& where) {
  std::string text;
  if (j.is_string()) {
    text = j.get<std::string>();
  } else if (j.is_number()) {
    text = j.dump();
  } else {
    schema_error(where, "expected a decimal string");
  }
  try {
    (void)RealOps<double>::parse(text);
  } catch (const std::exception&) {
    schema_error(where, "'" + text + "' is not a decimal number");
  }
  return text;
}

ComplexText get_complex(const json& j, const std::string& where) {
  if (j.is_array()) {
    if (j.size() != 2) schema_error(where, "complex entries are [re, im]");
    return {get_decimal(j[0], where + "[0]"), get_decimal(j[1], where + "[1]")};
  }
  return {get_decimal(j, where), "0"};
}

std::array<ComplexText, 4> get_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) schema_error(where, "expected a 2x2 matrix [[a, b], [c, d]]");
  std::array<ComplexText, 4> out;
  for (std::size_t r = 0; r < 2; ++r) {
    const auto row_where = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != 2) schema_error(row_where, "expected a row of two entries");
    for (std::size_t c = 0; c < 2; ++c) {
      out[2 * r + c] = get_complex(j[r][c], row_where + "[" + std::to_string(c) + "]");
    }
  }
  return out;
}

void check_sign_text(const std::string& s, int components, const std::string& where) {
  const SignAssignment parsed = [&] {
    try {
      return SignAssignment::parse(s);
    } catch (const InputError& e) {
      schema_error(where, e.what());
    }
  }();
  if (parsed.size() != components) {
    schema_error(where, "sign assignment '" + s + "' has " + std::to_string(parsed.size()) + " entries for " +
                            std::to_string(components) + " components");
  }
}

RunConfig get_config(const json& j) {
  const std::string where = "config";
  check_keys(j, where, {"n_min", "n_max", "parity", "point", "mode"});
  RunConfig c;
  if (j.contains("n_min")) c.n_min = get_int(j["n_min"], where + ".n_min");
  if (j.contains("n_max")) c.n_max = get_int(j["n_max"], where + ".n_max");
  if (j.contains("parity")) c.parity = get_string(j["parity"], where + ".parity");
  if (j.contains("point")) c.point = get_string(j["point"], where + ".point");
  if (j.contains("mode")) c.mode = get_string(j["mode"], where + ".mode");
  if (c.n_min < 1) schema_error(where, "n_min must be >= 1");
  if (c.n_max < c.n_min) schema_error(where, "n_max must be >= n_min");
  try {
    (void)parse_parity(c.parity);
    (void)parse_mode(c.mode);
    (void)EvaluationPoint::parse(c.point);
  } catch (const InputError& e) {
    schema_error(where, e.what());
  }
  return c;
}

ExpectedSeries get_expected(const json& j, const std::string& where, int components) {
  check_keys(j, where, {"source", "sign", "mode", "point", "estimators"});
  ExpectedSeries e;
  e.source = get_string(require(j, "source", where), where + ".source");
  e.sign = get_string(require(j, "sign", where), where + ".sign");
  e.mode = get_string(require(j, "mode", where), where + ".mode");
  if (j.contains("point")) e.point = get_string(j["point"], where + ".point");
  check_sign_text(e.sign, components, where + ".sign");
  try {
    (void)parse_mode(e.mode);
    (void)EvaluationPoint::parse(e.point);
  } catch (const InputError& err) {
    schema_error(where, err.what());
  }
  const json& est = require(j, "estimators", where);
  if (!est.is_object()) schema_error(where + ".estimators", "expected an object mapping n to a value");
  for (const auto& [key, value] : est.items()) {
    char* end = nullptr;
    const long n = std::strtol(key.c_str(), &end, 10);
    if (key.empty() || *end != '\0' || n < 1 || n > 100000) {
      schema_error(where + ".estimators", "key '" + key + "' is not a dimension");
    }
    e.estimators.emplace_back(static_cast<int>(n), get_decimal(value, where + ".estimators." + key));
  }
  return e;
}

json complex_json(const ComplexText& z) { return json::array({z.re, z.im}); }

bool inline_array(const json& j) {
  if (!j.is_array()) return false;
  return std::all_of(j.begin(), j.end(), [](const json& e) {
    if (e.is_primitive()) return true;
    return e.is_array() && std::all_of(e.begin(), e.end(), [](const json& x) { return x.is_primitive(); });
  });
}

// Two-space indentation with short arrays kept on one line, so that a matrix
// row reads as [[re, im], [re, im]].
void pretty(const json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad + "  " + json(key).dump() + ": ";
      pretty(value, indent + 2, out);
    }
    out += "\n" + pad + "}";
  } else if (inline_array(j)) {
    out += "[";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i > 0) out += ", ";
      if (j[i].is_array()) {
        pretty(j[i], indent, out);
      } else {
        out += j[i].dump();
      }
    }
    out += "]";
  } else if (j.is_array()) {
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i > 0) out += ",\n";
      out += pad + "  ";
      pretty(j[i], indent + 2, out);
    }
    out += "\n" + pad + "]";
  } else {
    out += j.dump();
  }
}

// ---------------------------------------------------------------------------
// Fixtures

struct Branch {
  std::string label;
  std::string b10_re, b10_im;  // lower-left entry of Hol(b)
};

Holonomy parabolic_pair(const Branch& br) {
  Holonomy h;
  h.branch = br.label;
  h.matrices.push_back({ComplexText{"1", "0"}, ComplexText{"1", "0"}, ComplexText{"0", "0"}, ComplexText{"1", "0"}});
  h.matrices.push_back(
      {ComplexText{"1", "0"}, ComplexText{"0", "0"}, ComplexText{br.b10_re, br.b10_im}, ComplexText{"1", "0"}});
  return h;
}

ExpectedSeries series(const char* source, const char* sign, const char* mode,
                      std::vector<std::pair<int, std::string>> values) {
  return {source, sign, mode, "1", std::move(values)};
}

constexpr int kFixtureDigits = 120;

InputDocument figure8_fixture() {
  std::string half_sqrt3;
  {
    MpPrecisionScope scope(448);
    half_sqrt3 = RealOps<mp>::format(RealOps<mp>::sqrt(mp(3)) / 2, kFixtureDigits);
  }
  InputDocument d;
  d.name = "figure8";
  d.description =
      "Figure-eight knot. Hol(a) = [[1,1],[0,1]], Hol(b) = [[1,0],[-u,1]] with u a root of u^2 + u + 1 = 0; "
      "one document branch per root.";
  d.generators = {{"a", 0}, {"b", 0}};
  d.relators = {"a b^-1 a^-1 b a = b a b^-1 a^-1 b"};
  d.alpha = {1};
  // -u for u = (-1 +- sqrt(3) i) / 2
  d.holonomies.push_back(parabolic_pair({"u = (-1 + sqrt(3) i)/2", "0.5", "-" + half_sqrt3}));
  d.holonomies.push_back(parabolic_pair({"u = (-1 - sqrt(3) i)/2", "0.5", half_sqrt3}));
  d.signs = {"+", "-"};
  d.config = RunConfig{4, 20, "both", "1", "ratio"};
  const char* table = "published table";
  d.expected = {
      series("closed form", "+", "ratio", {{4, "0.544397"}, {5, "1.12273"}}),
      series(table, "+", "ratio",
             {{15, "1.93360"}, {20, "1.97120"}, {25, "1.99522"}, {30, "2.00380"}, {35, "2.01219"}}),
      series(table, "+", "plain",
             {{15, "1.99496"}, {20, "1.99298"}, {25, "2.01731"}, {30, "2.01348"}, {35, "2.02346"}}),
      series(table, "-", "ratio",
             {{16, "1.98381"}, {20, "2.00039"}, {26, "2.01243"}, {30, "2.01677"}, {36, "2.02078"}}),
      series(table, "-", "plain",
             {{16, "2.07177"}, {20, "2.05668"}, {26, "2.04574"}, {30, "2.04179"}, {36, "2.03815"}}),
  };
  return d;
}

InputDocument whitehead_fixture() {
  InputDocument d;
  d.name = "whitehead";
  d.description =
      "Whitehead link, one meridian per component. Hol(a) = [[1,1],[0,1]], Hol(b) = [[1,0],[g,1]] with "
      "g = -1 + i or g = -1 - i; alpha sends both meridians to t.";
  d.generators = {{"a", 0}, {"b", 1}};
  d.relators = {"a b a b^-1 a^-1 b^-1 a b a^-1 b^-1 a^-1 b a b a^-1 b^-1"};
  d.alpha = {1, 1};
  d.holonomies.push_back(parabolic_pair({"g = -1 + i", "-1", "1"}));
  d.holonomies.push_back(parabolic_pair({"g = -1 - i", "-1", "-1"}));
  d.signs = {"++", "+-", "-+", "--"};
  d.config = RunConfig{4, 20, "both", "1", "ratio"};
  const char* table = "published table";
  const std::vector<int> odd_even{10, 15, 20, 25, 30};
  const std::vector<int> even{10, 16, 20, 26, 30};
  auto zip = [](const std::vector<int>& n, std::vector<std::string> v) {
    std::vector<std::pair<int, std::string>> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.emplace_back(n[i], v[i]);
    return out;
  };
  d.expected = {
      series(table, "++", "ratio", zip(odd_even, {"3.43083", "3.52207", "3.60589", "3.61282", "3.63810"})),
      series(table, "++", "plain", zip(odd_even, {"3.56149", "3.65757", "3.63856", "3.66160", "3.65261"})),
      series(table, "+-", "ratio", zip(even, {"3.54395", "3.61657", "3.63358", "3.64594", "3.65040"})),
      series(table, "+-", "plain", zip(even, {"3.67460", "3.66761", "3.66625", "3.66527", "3.66492"})),
      series(table, "-+", "ratio", zip(even, {"3.54395", "3.61657", "3.63358", "3.64594", "3.65040"})),
      series(table, "-+", "plain", zip(even, {"3.67460", "3.66761", "3.66625", "3.66527", "3.66492"})),
      series(table, "--", "ratio", zip(even, {"3.45010", "3.58080", "3.61071", "3.63241", "3.64024"})),
      series(table, "--", "plain", zip(even, {"3.78300", "3.71084", "3.69394", "3.68166", "3.67723"})),
  };
  return d;
}

// ---------------------------------------------------------------------------
// Formatting helpers

std::string format_real(double x, int digits) {
  if (x == 0) x = 0;  // no "-0"
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

// Coefficient text and whether it is a lone real number (so that "1" and "-1"
// may be elided in front of a power of t).
std::string format_coefficient(const cdouble& c, double zero, int digits, bool& real_only) {
  const bool re_zero = std::abs(c.re) <= zero;
  const bool im_zero = std::abs(c.im) <= zero;
  real_only = im_zero;
  if (im_zero) return format_real(c.re, digits);
  if (re_zero) {
    const double m = std::abs(c.im);
    return (c.im < 0 ? "-" : "") + (m == 1 ? std::string() : format_real(m, digits)) + "i";
  }
  const double m = std::abs(c.im);
  return "(" + format_real(c.re, digits) + (c.im < 0 ? "-" : "+") + (m == 1 ? std::string() : format_real(m, digits)) +
         "i)";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string full_precision(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  return printf_string("%.17g", x);
}

// ---------------------------------------------------------------------------
// Command helpers

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const MathError& e) {
    err << "error: " << e.what() << "\n";
    return kExitMath;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitMath;
  }
}

void check_branch(const InputDocument& doc, int branch) {
  if (branch < 0 || branch >= static_cast<int>(doc.holonomies.size())) {
    throw InputError("branch " + std::to_string(branch) + " out of range; the document has " +
                     std::to_string(doc.holonomies.size()) + " holonomy branch(es)");
  }
}

SignAssignment checked_signs(const std::string& text, int components) {
  const SignAssignment s = text.empty() ? SignAssignment::all_plus(components) : SignAssignment::parse(text);
  if (s.size() != components) {
    throw InputError("sign assignment '" + text + "' does not match " + std::to_string(components) + " components");
  }
  return s;
}

std::vector<SignAssignment> sign_list(const std::vector<std::string>& texts, const InputDocument& doc, int components) {
  std::vector<std::string> chosen = texts;
  if (chosen.empty()) chosen = doc.signs;
  std::vector<SignAssignment> out;
  if (chosen.empty() || (chosen.size() == 1 && chosen[0] == "all")) return SignAssignment::enumerate(components);
  for (const auto& t : chosen) out.push_back(checked_signs(t, components));
  return out;
}

std::string format_report_double(double x) { return printf_string("%.3g", x); }

// num / den when den divides num up to a relative remainder of 1e-8.
std::optional<LaurentPoly<double>> exact_quotient(const LaurentPoly<double>& num, const LaurentPoly<double>& den) {
  if (num.is_zero() || den.is_zero()) return std::nullopt;
  const auto n = num.coefficients();
  const auto d = den.coefficients();
  if (n.size() < d.size()) return std::nullopt;
  std::vector<cdouble> rem(n.begin(), n.end());
  std::vector<cdouble> q(n.size() - d.size() + 1);
  const cdouble lead = d.back();
  for (std::size_t k = q.size(); k-- > 0;) {
    const cdouble c = rem[k + d.size() - 1] / lead;
    q[k] = c;
    for (std::size_t i = 0; i < d.size(); ++i) rem[k + i] -= c * d[i];
  }
  double scale = 0;
  for (const auto& c : n) scale = std::max(scale, abs(c));
  double r = 0;
  for (std::size_t i = 0; i + 1 < d.size(); ++i) r = std::max(r, abs(rem[i]));
  if (r > 1e-8 * scale) return std::nullopt;
  return LaurentPoly<double>(num.lo() - den.lo(), std::move(q));
}

template <class R>
WadaInvariant<double> invariant_at(const Example& ex, int n, const SignAssignment& signs) {
  const auto rho2 = to_sl2<R>(ex.holonomy);
  const auto rho = lift_rep<R>(n, ex.presentation, rho2, signs);
  const auto w = wada_invariant<R>(ex.presentation, rho, ex.alpha);
  WadaInvariant<double> out;
  out.num = poly_cast<double>(w.num);
  out.den = poly_cast<double>(w.den);
  out.deleted_index = w.deleted_index;
  out.dim = w.dim;
  out.signs = w.signs;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

InputDocument parse_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  try {
    const std::string top = "document";
    check_keys(j, top,
               {"format", "name", "description", "generators", "relators", "alpha", "holonomy", "signs", "config",
                "expected"});
    InputDocument d;
    d.format = get_string(require(j, "format", top), "format");
    if (d.format != kDocumentFormat) {
      schema_error("format", "unsupported format '" + d.format + "' (expected " + kDocumentFormat + ")");
    }
    d.name = get_string(require(j, "name", top), "name");
    if (j.contains("description")) d.description = get_string(j["description"], "description");

    const json& gens = require(j, "generators", top);
    if (!gens.is_array() || gens.empty()) schema_error("generators", "expected a non-empty array");
    int components = 0;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const auto where = "generators[" + std::to_string(i) + "]";
      check_keys(gens[i], where, {"name", "component"});
      Generator g;
      g.name = get_string(require(gens[i], "name", where), where + ".name");
      g.component = get_int(require(gens[i], "component", where), where + ".component");
      if (g.component < 0) schema_error(where + ".component", "must be >= 0");
      components = std::max(components, g.component + 1);
      d.generators.push_back(g);
    }

    const json& rels = require(j, "relators", top);
    if (!rels.is_array()) schema_error("relators", "expected an array of words");
    for (std::size_t i = 0; i < rels.size(); ++i) {
      d.relators.push_back(get_string(rels[i], "relators[" + std::to_string(i) + "]"));
    }

    const json& alpha = require(j, "alpha", top);
    if (!alpha.is_array()) schema_error("alpha", "expected an array of integers");
    for (std::size_t i = 0; i < alpha.size(); ++i) d.alpha.push_back(get_int(alpha[i], "alpha[" + std::to_string(i) + "]"));
    if (static_cast<int>(d.alpha.size()) != components) {
      schema_error("alpha", "has " + std::to_string(d.alpha.size()) + " entries for " + std::to_string(components) +
                                " components");
    }

    const json& hol = require(j, "holonomy", top);
    if (!hol.is_array() || hol.empty()) schema_error("holonomy", "expected a non-empty array of branches");
    for (std::size_t b = 0; b < hol.size(); ++b) {
      const auto where = "holonomy[" + std::to_string(b) + "]";
      check_keys(hol[b], where, {"branch", "matrices"});
      Holonomy h;
      if (hol[b].contains("branch")) h.branch = get_string(hol[b]["branch"], where + ".branch");
      const json& mats = require(hol[b], "matrices", where);
      if (!mats.is_object()) schema_error(where + ".matrices", "expected an object keyed by generator name");
      for (const auto& [key, value] : mats.items()) {
        if (std::none_of(d.generators.begin(), d.generators.end(), [&](const Generator& g) { return g.name == key; })) {
          schema_error(where + ".matrices", "matrix for undeclared generator '" + key + "'");
        }
      }
      for (const auto& g : d.generators) {
        if (!mats.contains(g.name)) schema_error(where + ".matrices", "no matrix for generator '" + g.name + "'");
        h.matrices.push_back(get_matrix(mats[g.name], where + ".matrices." + g.name));
      }
      d.holonomies.push_back(std::move(h));
    }

    if (j.contains("signs")) {
      const json& s = j["signs"];
      if (!s.is_array()) schema_error("signs", "expected an array of sign strings");
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto where = "signs[" + std::to_string(i) + "]";
        d.signs.push_back(get_string(s[i], where));
        check_sign_text(d.signs.back(), components, where);
      }
    }
    if (j.contains("config")) d.config = get_config(j["config"]);
    if (j.contains("expected")) {
      const json& e = j["expected"];
      if (!e.is_array()) schema_error("expected", "expected an array");
      for (std::size_t i = 0; i < e.size(); ++i) {
        d.expected.push_back(get_expected(e[i], "expected[" + std::to_string(i) + "]", components));
      }
    }
    return d;
  } catch (const json::exception& e) {
    throw InputError(std::string("schema error: ") + e.what());
  }
}

std::string emit_document(const InputDocument& d) {
  json j;
  j["format"] = d.format;
  j["name"] = d.name;
  if (!d.description.empty()) j["description"] = d.description;
  j["generators"] = json::array();
  for (const auto& g : d.generators) j["generators"].push_back({{"name", g.name}, {"component", g.component}});
  j["relators"] = d.relators;
  j["alpha"] = d.alpha;
  j["holonomy"] = json::array();
  for (const auto& h : d.holonomies) {
    json mats = json::object();
    for (std::size_t i = 0; i < h.matrices.size() && i < d.generators.size(); ++i) {
      const auto& m = h.matrices[i];
      mats[d.generators[i].name] = json::array({json::array({complex_json(m[0]), complex_json(m[1])}),
                                                json::array({complex_json(m[2]), complex_json(m[3])})});
    }
    j["holonomy"].push_back({{"branch", h.branch}, {"matrices", mats}});
  }
  if (!d.signs.empty()) j["signs"] = d.signs;
  if (d.config) {
    j["config"] = {{"n_min", d.config->n_min},
                   {"n_max", d.config->n_max},
                   {"parity", d.config->parity},
                   {"point", d.config->point},
                   {"mode", d.config->mode}};
  }
  if (!d.expected.empty()) {
    j["expected"] = json::array();
    for (const auto& e : d.expected) {
      json est = json::object();
      for (const auto& [n, v] : e.estimators) est[std::to_string(n)] = v;
      j["expected"].push_back(
          {{"source", e.source}, {"sign", e.sign}, {"mode", e.mode}, {"point", e.point}, {"estimators", est}});
    }
  }
  std::string out;
  pretty(j, 0, out);
  return out + "\n";
}

InputDocument load_document(const std::string& path_or_name) {
  std::ifstream in(path_or_name, std::ios::binary);
  if (in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      return parse_document(buf.str());
    } catch (const InputError& e) {
      throw InputError(path_or_name + ": " + e.what());
    }
  }
  const auto names = fixture_names();
  if (std::find(names.begin(), names.end(), path_or_name) != names.end()) return fixture(path_or_name);
  throw InputError("cannot open '" + path_or_name + "' and no built-in example has that name");
}

Example to_example(const InputDocument& doc, int branch, std::vector<std::string>* warnings) {
  check_branch(doc, branch);
  Example ex;
  ex.name = doc.name;
  ex.presentation = parse_presentation(doc.generators, doc.relators, warnings);
  if (static_cast<int>(doc.alpha.size()) != ex.presentation.component_count()) {
    throw InputError("alpha has " + std::to_string(doc.alpha.size()) + " entries for " +
                     std::to_string(ex.presentation.component_count()) + " components");
  }
  ex.alpha = AlphaMap(ex.presentation, doc.alpha);
  ex.holonomy = doc.holonomies[static_cast<std::size_t>(branch)];
  return ex;
}

std::vector<std::string> fixture_names() { return {"figure8", "whitehead"}; }

InputDocument fixture(const std::string& name) {
  if (name == "figure8") return figure8_fixture();
  if (name == "whitehead") return whitehead_fixture();
  throw InputError("unknown example '" + name + "' (known: figure8, whitehead)");
}

LaurentPoly<double> unit_normalized(const LaurentPoly<double>& p) {
  if (p.is_zero()) return p;
  const auto c = p.coefficients();
  const cdouble lead = c.back();
  double scale = 0;
  for (const auto& x : c) scale = std::max(scale, abs(x));
  const double tiny = 1e-12 * scale;
  const bool flip = std::abs(lead.re) > tiny ? lead.re < 0 : lead.im < 0;
  std::vector<cdouble> out(c.begin(), c.end());
  if (flip) {
    for (auto& x : out) x = -x;
  }
  return LaurentPoly<double>(0, std::move(out));
}

std::string format_poly(const LaurentPoly<double>& p, int digits) {
  if (p.is_zero()) return "0";
  const auto c = p.coefficients();
  double scale = 0;
  for (const auto& x : c) scale = std::max(scale, abs(x));
  // Components invisible at the requested number of digits are dropped.
  const double zero = std::max(1e-12, std::pow(10.0, -digits)) * scale;
  std::string out;
  for (std::size_t i = c.size(); i-- > 0;) {
    const int e = p.lo() + static_cast<int>(i);
    if (abs(c[i]) <= zero) continue;
    bool real_only = false;
    std::string coef = format_coefficient(c[i], zero, digits, real_only);
    bool negative = coef.front() == '-';
    if (negative) coef.erase(0, 1);
    std::string power = e == 0 ? "" : e == 1 ? "t" : "t^" + std::to_string(e);
    std::string term;
    if (e != 0 && real_only && coef == "1") {
      term = power;
    } else {
      term = coef + (power.empty() ? "" : " " + power);
    }
    if (out.empty()) {
      out = (negative ? "-" : "") + term;
    } else {
      out += negative ? " - " : " + ";
      out += term;
    }
  }
  return out.empty() ? "0" : out;
}

std::string render_table(const EstimateTable& t) {
  std::ostringstream os;
  if (t.conjectural) os << "# " << kConjecturalBanner << "\n";
  os << "# " << t.example << "  branch " << t.branch << "  sign " << t.sign << "  mode " << to_string(t.mode)
     << "  t = " << t.point << "\n";
  const bool acc = !t.accelerated.empty();
  os << "   n  parity   estimator        log|value|  zero  precision  runtime_ms";
  if (acc) os << "   aitken*";
  os << "  status\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    os << std::setw(4) << r.n << "  " << std::left << std::setw(6) << (r.n % 2 == 0 ? "even" : "odd") << std::right;
    if (r.ok()) {
      os << "  " << std::setw(10) << printf_string("%.5f", r.estimator) << "  " << std::setw(16)
         << printf_string("%.10g", r.modulus_log) << "  " << std::setw(4) << r.zero_order << "  " << std::left
         << std::setw(9) << r.diagnostics.precision << std::right;
    } else {
      os << "  " << std::setw(10) << "-" << "  " << std::setw(16) << "-" << "  " << std::setw(4) << "-" << "  "
         << std::left << std::setw(9) << "-" << std::right;
    }
    os << "  " << std::setw(10) << printf_string("%.1f", r.runtime_ms);
    if (acc) {
      const auto& a = t.accelerated[i];
      os << "  " << std::setw(8) << (a ? printf_string("%.5f", *a) : std::string("-"));
    }
    os << "  " << r.status << "\n";
  }
  if (acc) os << "# * " << kExtrapolatedLabel << "\n";
  return os.str();
}

std::string render_csv(const std::vector<EstimateTable>& tables) {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const auto& t : tables) {
    for (const auto& r : t.rows) {
      os << r.n << "," << (r.n % 2 == 0 ? "even" : "odd") << "," << csv_field(r.sign) << "," << to_string(r.mode)
         << "," << csv_field(r.point) << "," << (r.ok() ? full_precision(r.modulus_log) : "") << ","
         << (r.ok() ? full_precision(r.estimator) : "") << "," << (r.ok() ? std::to_string(r.zero_order) : "") << ","
         << printf_string("%.3f", r.runtime_ms) << "," << csv_field(r.status) << "\n";
    }
  }
  return os.str();
}

PrecisionPolicy resolve_precision(const std::string& flag, bool certify) {
  std::string choice = flag;
  if (choice.empty()) {
    if (const char* env = std::getenv("TWV_PRECISION"); env != nullptr && *env != '\0') choice = env;
  }
  PrecisionPolicy p;
  p.certify = certify;
  if (choice.empty() || choice == "auto") {
    p.automatic = true;
    return p;
  }
  p.automatic = false;
  p.fixed = parse_precision(choice);
  return p;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const InputDocument doc = load_document(o.input);
    std::vector<std::string> warnings;
    const Example ex = to_example(doc, o.branch, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    const Presentation& p = ex.presentation;
    bool ok = true;

    const PresentationReport pr = validate_presentation(p, ex.alpha);
    out << "presentation " << doc.name << ": " << p.generator_count() << " generators, " << p.relator_count()
        << " relators, deficiency " << pr.deficiency << ", " << p.component_count() << " component(s), alpha gcd "
        << pr.alpha_gcd << "\n";
    for (int i = 0; i < p.relator_count(); ++i) {
      out << "  r" << i << " = " << p.format(p.relators()[static_cast<std::size_t>(i)]) << "  (alpha-degree "
          << (static_cast<std::size_t>(i) < pr.relator_degrees.size() ? pr.relator_degrees[static_cast<std::size_t>(i)]
                                                                      : 0)
          << ")\n";
    }
    for (const auto& f : pr.failures) out << "  FAIL " << f << "\n";
    ok = ok && pr.ok();

    // No determinant tolerance here: defects are measured and reported below.
    const auto rho2 = to_sl2<double>(ex.holonomy, std::numeric_limits<double>::infinity());
    out << "holonomy branch: " << ex.holonomy.branch << "\n";
    for (int n : o.dims) {
      if (n < 1) throw InputError("dimension must be >= 1");
      for (const auto& s : sign_list(o.signs, doc, p.component_count())) {
        const auto rho = lift_rep<double>(n, p, rho2, s);
        const RepReport r = verify_rep(p, rho, o.tol);
        out << "n=" << n << " signs " << s.to_string() << ": relator residual "
            << format_report_double(r.max_relator_residual) << ", det defect " << format_report_double(r.max_det_defect)
            << ", trace defect " << format_report_double(r.max_trace_defect) << "  " << (r.ok() ? "PASS" : "FAIL")
            << "\n";
        for (const auto& g : r.generators) {
          out << "  " << g.generator << " (component " << g.component << "): trace "
              << format_report_double(g.trace_re) << (g.trace_im < 0 ? " - " : " + ")
              << format_report_double(std::abs(g.trace_im)) << "i, expected "
              << format_report_double(g.expected_trace) << ", |det - 1| " << format_report_double(g.det_defect) << "\n";
        }
        for (const auto& f : r.failures) out << "  FAIL " << f << "\n";
        ok = ok && r.ok();
      }
    }
    out << (ok ? "verify: PASS" : "verify: FAIL") << "\n";
    return ok ? kExitOk : kExitMath;
  });
}

int cmd_invariant(const InvariantOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.n < 1) throw InputError("n must be >= 1");
    if (o.print != "poly" && o.print != "value") throw InputError("--print must be poly or value");
    const InputDocument doc = load_document(o.input);
    std::vector<std::string> warnings;
    const Example ex = to_example(doc, o.branch, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    const SignAssignment signs = checked_signs(o.signs, ex.presentation.component_count());
    const PrecisionPolicy policy = resolve_precision(o.precision, false);
    const int digits = std::clamp(o.digits, 1, 17);

    out << doc.name << "  n=" << o.n << "  signs " << signs.to_string() << "  branch " << ex.holonomy.branch
        << "\n";
    if (o.print == "poly") {
      const PrecisionSpec spec = policy.automatic ? PrecisionPolicy::automatic_for(o.n) : policy.fixed;
      const WadaInvariant<double> w =
          with_precision(spec, [&]<class R>() { return invariant_at<R>(ex, o.n, signs); });
      out << "deleted generator: "
          << ex.presentation.generators()[static_cast<std::size_t>(w.deleted_index)].name << "\n";
      out << "precision: " << to_string(spec) << "\n";
      out << "num: " << format_poly(unit_normalized(w.num), digits) << "\n";
      out << "den: " << format_poly(unit_normalized(w.den), digits) << "\n";
      if (const auto q = exact_quotient(w.num, w.den)) {
        out << "quotient: " << format_poly(unit_normalized(*q), digits) << "\n";
      }
      out << "(each up to a unit +-t^p)\n";
      return kExitOk;
    }
    const EvaluationPoint point = EvaluationPoint::parse(o.at);
    const Evaluation ev = delta_limit(ex, signs, o.n, point, policy);
    out << "t = " << point.label() << "\n";
    out << "zero order: " << ev.zero_order << " (numerator " << ev.num_multiplicity << ", denominator "
        << ev.den_multiplicity << ")\n";
    if (ev.zero_order > 0) {
      out << "limit: 0\n";
    } else {
      out << "log|value|: " << format_real(ev.modulus_log, digits) << "\n";
      out << "|value|: " << format_real(std::exp(ev.modulus_log), digits) << "\n";
    }
    out << "precision: " << ev.precision;
    if (ev.certification_delta) out << " (certified, |delta log| " << format_report_double(*ev.certification_delta) << ")";
    out << "\n";
    if (!ev.substitution.empty()) out << "conditioning: " << ev.substitution << "\n";
    return kExitOk;
  });
}

int cmd_volume(const VolumeOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const InputDocument doc = load_document(o.input);
    std::vector<std::string> warnings;
    const Example ex = to_example(doc, o.branch, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";

    const RunConfig base = doc.config.value_or(RunConfig{});
    SeriesConfig cfg;
    cfg.n_min = o.n_min.value_or(base.n_min);
    cfg.n_max = o.n_max.value_or(base.n_max);
    if (o.n_max && !o.n_min && cfg.n_min > cfg.n_max) cfg.n_min = 1;
    if (cfg.n_min < 1 || cfg.n_max < cfg.n_min) throw InputError("need 1 <= nmin <= nmax");
    cfg.n_values = o.n_values;
    for (int n : cfg.n_values) {
      if (n < 1) throw InputError("dimensions must be >= 1");
    }
    cfg.parity = parse_parity(o.parity.value_or(base.parity));
    cfg.point = EvaluationPoint::parse(o.at.value_or(base.point));
    cfg.mode = parse_mode(o.mode.value_or(base.mode));
    cfg.exploratory = o.exploratory;
    cfg.accelerate = o.accelerate;
    cfg.precision = resolve_precision(o.precision, o.certify);
    if (cfg.point.exploratory() && !cfg.exploratory) {
      throw InputError("t = " + cfg.point.label() +
                       " is exploratory; pass --exploratory to evaluate at roots of unity other than +-1");
    }

    std::vector<EstimateTable> tables;
    for (const auto& s : sign_list(o.signs, doc, ex.presentation.component_count())) {
      cfg.signs = s;
      tables.push_back(run_series(cfg, ex));
    }

    const bool csv_to_stdout = o.csv_path == "-";
    if (!csv_to_stdout) {
      for (std::size_t i = 0; i < tables.size(); ++i) {
        if (i > 0) out << "\n";
        out << render_table(tables[i]);
      }
    }
    const std::string csv = render_csv(tables);
    if (csv_to_stdout) {
      out << csv;
    } else if (!o.csv_path.empty()) {
      std::ofstream f(o.csv_path, std::ios::binary);
      if (!f) throw InputError("cannot write '" + o.csv_path + "'");
      f << csv;
    }
    bool any_ok = false;
    for (const auto& t : tables) {
      for (const auto& r : t.rows) any_ok = any_ok || r.ok();
    }
    if (!any_ok) err << "error: no row succeeded\n";
    return any_ok ? kExitOk : kExitMath;
  });
}

int cmd_examples(const ExamplesOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.action == "list") {
      for (const auto& name : fixture_names()) out << name << "\n";
      return kExitOk;
    }
    if (o.action != "emit") throw InputError("examples action must be list or emit");
    if (o.name.empty()) throw InputError("examples emit needs a name");
    const std::string text = emit_document(fixture(o.name));
    if (o.output.empty() || o.output == "-") {
      out << text;
    } else {
      std::ofstream f(o.output, std::ios::binary);
      if (!f) throw InputError("cannot write '" + o.output + "'");
      f << text;
    }
    return kExitOk;
  });
}

}  // namespace twv
