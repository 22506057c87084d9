#include "twv/group_words.hpp"

#include <cctype>
#include <numeric>
#include <set>
#include <sstream>

#include "twv/errors.hpp"

namespace twv {

std::vector<Letter> free_reduce(std::vector<Letter> letters) {
  std::vector<Letter> out;
  out.reserve(letters.size());
  for (const Letter& l : letters) {
    if (!out.empty() && out.back().generator == l.generator && out.back().sign == -l.sign) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

Word::Word(std::vector<Letter> letters) : letters_(free_reduce(std::move(letters))) {}

Word Word::generator(int index, int sign) { return Word({Letter{index, sign}}); }

Word Word::inverse() const {
  Word w;
  w.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) {
    w.letters_.push_back({it->generator, -it->sign});
  }
  return w;
}

Word Word::prefix(std::size_t length) const {
  Word w;
  w.letters_.assign(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(length));
  return w;
}

Word operator*(const Word& u, const Word& v) {
  // Only the junction can cancel.
  std::size_t cut = 0;
  const auto& a = u.letters_;
  const auto& b = v.letters_;
  while (cut < a.size() && cut < b.size()) {
    const Letter& x = a[a.size() - 1 - cut];
    const Letter& y = b[cut];
    if (x.generator != y.generator || x.sign != -y.sign) break;
    ++cut;
  }
  Word w;
  w.letters_.reserve(a.size() + b.size() - 2 * cut);
  w.letters_.insert(w.letters_.end(), a.begin(), a.end() - static_cast<std::ptrdiff_t>(cut));
  w.letters_.insert(w.letters_.end(), b.begin() + static_cast<std::ptrdiff_t>(cut), b.end());
  return w;
}

GroupRingElement::GroupRingElement(const Word& w, std::int64_t coefficient) { add_term(w, coefficient); }

std::int64_t GroupRingElement::coefficient(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? 0 : it->second;
}

void GroupRingElement::add_term(const Word& w, std::int64_t coefficient) {
  if (coefficient == 0) return;
  auto [it, inserted] = terms_.try_emplace(w, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0) terms_.erase(it);
  }
}

GroupRingElement& GroupRingElement::operator+=(const GroupRingElement& o) {
  for (const auto& [w, c] : o.terms_) add_term(w, c);
  return *this;
}

GroupRingElement& GroupRingElement::operator-=(const GroupRingElement& o) {
  for (const auto& [w, c] : o.terms_) add_term(w, -c);
  return *this;
}

GroupRingElement operator*(const GroupRingElement& a, const GroupRingElement& b) {
  GroupRingElement out;
  for (const auto& [u, cu] : a.terms_) {
    for (const auto& [v, cv] : b.terms_) out.add_term(u * v, cu * cv);
  }
  return out;
}

Presentation::Presentation(std::vector<Generator> generators, std::vector<Word> relators)
    : generators_(std::move(generators)), relators_(std::move(relators)) {
  std::set<std::string> names;
  std::set<int> components;
  for (const auto& g : generators_) {
    if (g.name.empty()) throw InputError("generator with empty name");
    if (!names.insert(g.name).second) throw InputError("duplicate generator name '" + g.name + "'");
    if (g.component < 0) throw InputError("negative component index for generator '" + g.name + "'");
    components.insert(g.component);
  }
  component_count_ = static_cast<int>(components.size());
  if (!components.empty() && *components.rbegin() != component_count_ - 1) {
    throw InputError("component indices must be contiguous from 0");
  }
  for (const auto& r : relators_) {
    for (const auto& l : r.letters()) {
      if (l.generator < 0 || l.generator >= generator_count()) {
        throw InputError("relator references undeclared generator index " + std::to_string(l.generator));
      }
    }
  }
}

int Presentation::index_of(const std::string& name) const {
  for (int i = 0; i < generator_count(); ++i) {
    if (generators_[i].name == name) return i;
  }
  return -1;
}

std::string Presentation::format(const Word& w) const {
  if (w.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& l : w.letters()) {
    if (!first) os << ' ';
    first = false;
    os << generators_.at(l.generator).name;
    if (l.sign < 0) os << "^-1";
  }
  return os.str();
}

namespace {

int find_generator(const std::vector<Generator>& generators, const std::string& name) {
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void append_token(const std::string& token, const std::vector<Generator>& generators,
                  std::vector<Letter>& out) {
  std::string name = token;
  long exponent = 1;
  if (auto caret = token.find('^'); caret != std::string::npos) {
    name = token.substr(0, caret);
    const std::string exp_text = token.substr(caret + 1);
    std::size_t used = 0;
    try {
      exponent = std::stol(exp_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (exp_text.empty() || used != exp_text.size()) {
      throw InputError("malformed exponent in token '" + token + "'");
    }
  }
  int index = find_generator(generators, name);
  if (index < 0 && name.size() == 1 && std::isupper(static_cast<unsigned char>(name[0]))) {
    const std::string lower(1, static_cast<char>(std::tolower(static_cast<unsigned char>(name[0]))));
    index = find_generator(generators, lower);
    exponent = -exponent;
  }
  if (index < 0) throw InputError("unknown generator '" + name + "'");
  const int sign = exponent < 0 ? -1 : 1;
  for (long k = 0; k < (exponent < 0 ? -exponent : exponent); ++k) out.push_back({index, sign});
}

}  // namespace

Word parse_word(const std::string& text, const std::vector<Generator>& generators) {
  std::istringstream is(text);
  std::vector<Letter> letters;
  std::string token;
  while (is >> token) {
    if (token == "1") continue;
    append_token(token, generators, letters);
  }
  return Word(std::move(letters));
}

Presentation parse_presentation(const std::vector<Generator>& generators,
                                const std::vector<std::string>& relator_texts,
                                std::vector<std::string>* warnings) {
  std::vector<Word> relators;
  for (const auto& text : relator_texts) {
    Word r;
    if (auto eq = text.find('='); eq != std::string::npos) {
      if (text.find('=', eq + 1) != std::string::npos) {
        throw InputError("relator has more than one '=': " + text);
      }
      r = parse_word(text.substr(0, eq), generators) * parse_word(text.substr(eq + 1), generators).inverse();
    } else {
      r = parse_word(text, generators);
    }
    if (r.empty()) {
      if (warnings) warnings->push_back("relator '" + text + "' reduces to the identity and was dropped");
      continue;
    }
    relators.push_back(std::move(r));
  }
  return Presentation(generators, std::move(relators));
}

AlphaMap::AlphaMap(const Presentation& p, std::vector<int> component_exponents)
    : component_exponents_(std::move(component_exponents)) {
  if (static_cast<int>(component_exponents_.size()) != p.component_count()) {
    throw InputError("alpha needs one exponent per component (" + std::to_string(p.component_count()) +
                     "), got " + std::to_string(component_exponents_.size()));
  }
  generator_exponents_.reserve(p.generators().size());
  for (const auto& g : p.generators()) generator_exponents_.push_back(component_exponents_[g.component]);
}

AlphaMap AlphaMap::unit(const Presentation& p) {
  return AlphaMap(p, std::vector<int>(static_cast<std::size_t>(p.component_count()), 1));
}

int alpha_degree(const Word& w, const AlphaMap& alpha) {
  int degree = 0;
  for (const auto& l : w.letters()) degree += l.sign * alpha.generator_exponent(l.generator);
  return degree;
}

GroupRingElement fox_derivative(const Word& w, int generator) {
  // d(y_1...y_L) = sum_i y_1...y_{i-1} d(y_i); d(x^-1)/dx = -x^-1.
  GroupRingElement out;
  const auto& letters = w.letters();
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (letters[i].generator != generator) continue;
    if (letters[i].sign > 0) {
      out.add_term(w.prefix(i), 1);
    } else {
      out.add_term(w.prefix(i + 1), -1);
    }
  }
  return out;
}

PresentationReport validate_presentation(const Presentation& p, const AlphaMap& alpha) {
  PresentationReport report;
  report.deficiency = p.deficiency();
  report.deficiency_ok = report.deficiency == 1;
  if (!report.deficiency_ok) {
    report.failures.push_back("deficiency is " + std::to_string(report.deficiency) + ", expected 1");
  }

  const auto& exps = alpha.component_exponents();
  report.exponents_positive = !exps.empty();
  int g = 0;
  for (int a : exps) {
    if (a < 1) report.exponents_positive = false;
    g = std::gcd(g, a);
  }
  report.alpha_gcd = g;
  if (!report.exponents_positive) {
    report.failures.push_back("alpha exponents must all be >= 1");
  }
  report.surjective = g == 1;
  if (!report.surjective) {
    report.failures.push_back("alpha is not surjective onto Z: gcd of exponents is " + std::to_string(g));
  }

  for (std::size_t i = 0; i < p.relators().size(); ++i) {
    const int d = alpha_degree(p.relators()[i], alpha);
    report.relator_degrees.push_back(d);
    if (d != 0) {
      report.failures.push_back("relator " + std::to_string(i) + " has alpha-degree " + std::to_string(d) +
                                " (alpha does not factor through the group)");
    }
  }
  return report;
}

}  // namespace twv
