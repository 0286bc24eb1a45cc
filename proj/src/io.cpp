#include "chanorder/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

namespace chanorder {

namespace {

struct Line {
  std::size_t number = 0;
  std::vector<std::string> tokens;
};

// Data lines only: blank lines and '#' comments are skipped.
class LineReader {
 public:
  LineReader(std::istream& in, std::string_view source) : in_(in), source_(source) {}

  std::optional<Line> next() {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_;
      std::istringstream ss(text);
      Line l{line_, {}};
      std::string tok;
      while (ss >> tok) l.tokens.push_back(tok);
      if (l.tokens.empty() || l.tokens.front().front() == '#') continue;
      return l;
    }
    return std::nullopt;
  }

  Line require(const char* what) {
    auto l = next();
    if (!l) throw ParseError(source_, 0, std::string("unexpected end of input, expected ") + what);
    return *l;
  }

  void expect_end() {
    if (auto l = next()) throw ParseError(source_, l->number, "unexpected trailing data '" + l->tokens.front() + "'");
  }

  [[noreturn]] void fail(std::size_t line, const std::string& message) const {
    throw ParseError(source_, line, message);
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

double parse_number(LineReader& r, const Line& l, const std::string& tok) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) r.fail(l.number, "not a number: '" + tok + "'");
  return v;
}

std::size_t parse_count(LineReader& r, const Line& l, const std::string& tok) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v == 0) {
    r.fail(l.number, "expected a positive count, got '" + tok + "'");
  }
  return v;
}

void expect_tokens(LineReader& r, const Line& l, std::size_t n, const char* what) {
  if (l.tokens.size() != n) {
    r.fail(l.number, std::string("expected ") + std::to_string(n) + " " + what + ", found " +
                         std::to_string(l.tokens.size()));
  }
}

Alphabet alphabet_at(LineReader& r, const Line& l, std::vector<std::string> labels) {
  try {
    return Alphabet(std::move(labels));
  } catch (const Error& e) {
    r.fail(l.number, e.what());
  }
}

// Labels in order of first appearance.
class Interner {
 public:
  std::size_t add(const std::string& label) {
    auto [it, inserted] = index_.emplace(label, labels_.size());
    if (inserted) labels_.push_back(label);
    return it->second;
  }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<std::string> labels_;
};

void write_labels(std::ostream& out, const Alphabet& a) {
  for (std::size_t i = 0; i < a.size(); ++i) out << (i ? " " : "") << a.label(i);
  out << '\n';
}

template <class T>
std::string text_of(const T& x, void (*writer)(std::ostream&, const T&)) {
  std::ostringstream ss;
  writer(ss, x);
  return ss.str();
}

template <class F>
auto read_file(const std::filesystem::path& path, F parse) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return parse(in, path.string());
}

}  // namespace

ParseError::ParseError(std::string source, std::size_t line, const std::string& message)
    : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + message),
      line_(line) {}

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

Channel parse_channel(std::istream& in, std::string_view source) {
  LineReader r(in, source);
  const Line head = r.require("'channel <n_inputs> <n_outputs>'");
  if (head.tokens.front() != "channel") r.fail(head.number, "expected keyword 'channel'");
  expect_tokens(r, head, 3, "tokens in 'channel <n_inputs> <n_outputs>'");
  const std::size_t n_in = parse_count(r, head, head.tokens[1]);
  const std::size_t n_out = parse_count(r, head, head.tokens[2]);

  const Line in_line = r.require("input labels");
  expect_tokens(r, in_line, n_in, "input labels");
  const Alphabet input = alphabet_at(r, in_line, in_line.tokens);
  const Line out_line = r.require("output labels");
  expect_tokens(r, out_line, n_out, "output labels");
  const Alphabet output = alphabet_at(r, out_line, out_line.tokens);

  Matrix m(n_out, n_in);
  for (std::size_t x = 0; x < n_out; ++x) {
    const Line row = r.require("a matrix row");
    expect_tokens(r, row, n_in, "entries in matrix row");
    for (std::size_t s = 0; s < n_in; ++s) m(x, s) = parse_number(r, row, row.tokens[s]);
  }
  r.expect_end();
  try {
    return Channel(input, output, std::move(m));
  } catch (const Error& e) {
    r.fail(head.number, e.what());
  }
}

ProbVector parse_prior(std::istream& in, std::string_view source) {
  LineReader r(in, source);
  const Line head = r.require("'prior <n>'");
  if (head.tokens.front() != "prior") r.fail(head.number, "expected keyword 'prior'");
  expect_tokens(r, head, 2, "tokens in 'prior <n>'");
  const std::size_t n = parse_count(r, head, head.tokens[1]);
  const Line labels = r.require("prior labels");
  expect_tokens(r, labels, n, "prior labels");
  const Alphabet alphabet = alphabet_at(r, labels, labels.tokens);
  const Line values = r.require("prior values");
  expect_tokens(r, values, n, "prior values");
  std::vector<double> mass;
  for (const auto& tok : values.tokens) mass.push_back(parse_number(r, values, tok));
  r.expect_end();
  try {
    return ProbVector(alphabet, std::move(mass));
  } catch (const Error& e) {
    r.fail(values.number, e.what());
  }
}

JointDistribution parse_joint(std::istream& in, std::string_view source) {
  LineReader r(in, source);
  const Line head = r.require("'joint'");
  if (head.tokens.front() != "joint") r.fail(head.number, "expected keyword 'joint'");
  expect_tokens(r, head, 1, "tokens in 'joint'");

  // Optional fixed alphabets.
  std::map<std::string, Alphabet> declared;
  while (true) {
    const Line l = r.require("header 's x1 x2 p'");
    if (l.tokens.front() == "labels") {
      if (l.tokens.size() < 3) r.fail(l.number, "expected 'labels <s|x1|x2> <label>...'");
      const std::string& var = l.tokens[1];
      if (var != "s" && var != "x1" && var != "x2") {
        r.fail(l.number, "unknown variable '" + var + "' (expected s, x1 or x2)");
      }
      if (declared.count(var)) r.fail(l.number, "labels for '" + var + "' given twice");
      declared.emplace(var, alphabet_at(r, l, {l.tokens.begin() + 2, l.tokens.end()}));
      continue;
    }
    if (l.tokens != std::vector<std::string>{"s", "x1", "x2", "p"}) {
      r.fail(l.number, "expected header 's x1 x2 p'");
    }
    break;
  }

  struct Entry {
    std::size_t line;
    std::string s, a, b;
    double p;
  };
  std::vector<Entry> entries;
  while (auto l = r.next()) {
    expect_tokens(r, *l, 4, "fields in joint row");
    entries.push_back({l->number, l->tokens[0], l->tokens[1], l->tokens[2],
                       parse_number(r, *l, l->tokens[3])});
  }
  if (entries.empty()) r.fail(0, "joint has no rows");

  Interner is, ia, ib;
  for (const auto& [var, alpha] : declared) {
    Interner& target = var == "s" ? is : var == "x1" ? ia : ib;
    for (const auto& lab : alpha.labels()) target.add(lab);
  }
  auto index_of = [&](Interner& intern, const char* var, const std::string& label,
                      std::size_t line) {
    if (declared.count(var)) {
      const auto& alpha = declared.at(var);
      auto idx = alpha.find(label);
      if (!idx) r.fail(line, std::string("symbol '") + label + "' not among the declared " + var + " labels");
      return *idx;
    }
    return intern.add(label);
  };
  std::vector<std::array<std::size_t, 3>> keys;
  for (const auto& e : entries) {
    keys.push_back({index_of(is, "s", e.s, e.line), index_of(ia, "x1", e.a, e.line),
                    index_of(ib, "x2", e.b, e.line)});
  }
  const Alphabet S(is.labels()), A(ia.labels()), B(ib.labels());
  std::vector<double> mass(S.size() * A.size() * B.size(), 0.0);
  std::vector<bool> seen(mass.size(), false);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::size_t flat = (keys[i][0] * A.size() + keys[i][1]) * B.size() + keys[i][2];
    if (seen[flat]) {
      r.fail(entries[i].line, "duplicate row for (" + entries[i].s + ", " + entries[i].a + ", " +
                                  entries[i].b + ")");
    }
    seen[flat] = true;
    mass[flat] = entries[i].p;
  }
  try {
    return JointDistribution(S, A, B, std::move(mass));
  } catch (const Error& e) {
    r.fail(head.number, e.what());
  }
}

UtilityTable parse_utility(std::istream& in, std::string_view source) {
  LineReader r(in, source);
  const Line head = r.require("'utility'");
  if (head.tokens.front() != "utility") r.fail(head.number, "expected keyword 'utility'");
  expect_tokens(r, head, 1, "tokens in 'utility'");
  const Line header = r.require("header 's a u'");
  if (header.tokens != std::vector<std::string>{"s", "a", "u"}) {
    r.fail(header.number, "expected header 's a u'");
  }
  Interner is, ia;
  std::map<std::pair<std::size_t, std::size_t>, double> values;
  std::size_t last_line = header.number;
  while (auto l = r.next()) {
    expect_tokens(r, *l, 3, "fields in utility row");
    const std::size_t s = is.add(l->tokens[0]), a = ia.add(l->tokens[1]);
    if (!values.emplace(std::make_pair(s, a), parse_number(r, *l, l->tokens[2])).second) {
      r.fail(l->number, "duplicate row for (" + l->tokens[0] + ", " + l->tokens[1] + ")");
    }
    last_line = l->number;
  }
  if (values.empty()) r.fail(0, "utility table has no rows");
  Matrix payoff(is.labels().size(), ia.labels().size());
  for (std::size_t s = 0; s < payoff.rows(); ++s)
    for (std::size_t a = 0; a < payoff.cols(); ++a) {
      auto it = values.find({s, a});
      if (it == values.end()) {
        r.fail(last_line, "missing utility for state '" + is.labels()[s] + "', action '" +
                              ia.labels()[a] + "' (the table must be total)");
      }
      payoff(s, a) = it->second;
    }
  return UtilityTable(Alphabet(is.labels()), Alphabet(ia.labels()), std::move(payoff));
}

void write_channel(std::ostream& out, const Channel& c) {
  out << "channel " << c.input().size() << ' ' << c.output().size() << '\n';
  write_labels(out, c.input());
  write_labels(out, c.output());
  for (std::size_t x = 0; x < c.output().size(); ++x) {
    for (std::size_t s = 0; s < c.input().size(); ++s) {
      out << (s ? " " : "") << format_number(c(x, s));
    }
    out << '\n';
  }
}

void write_prior(std::ostream& out, const ProbVector& p) {
  out << "prior " << p.size() << '\n';
  write_labels(out, p.alphabet());
  for (std::size_t i = 0; i < p.size(); ++i) out << (i ? " " : "") << format_number(p[i]);
  out << '\n';
}

void write_joint(std::ostream& out, const JointDistribution& j) {
  const std::size_t ns = j.s().size(), na = j.x1().size(), nb = j.x2().size();
  std::vector<std::size_t> order_s, order_a, order_b;
  auto note = [](std::vector<std::size_t>& order, std::size_t i) {
    if (std::find(order.begin(), order.end(), i) == order.end()) order.push_back(i);
  };
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t b = 0; b < nb; ++b)
        if (j(s, a, b) != 0.0) {
          note(order_s, s);
          note(order_a, a);
          note(order_b, b);
        }
  auto inferable = [](const std::vector<std::size_t>& order, std::size_t n) {
    if (order.size() != n) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (order[i] != i) return false;
    return true;
  };
  out << "joint\n";
  const std::pair<const char*, const Alphabet*> vars[] = {{"s", &j.s()}, {"x1", &j.x1()}, {"x2", &j.x2()}};
  const bool plain[] = {inferable(order_s, ns), inferable(order_a, na), inferable(order_b, nb)};
  for (int v = 0; v < 3; ++v) {
    if (plain[v]) continue;
    out << "labels " << vars[v].first << ' ';
    write_labels(out, *vars[v].second);
  }
  out << "s x1 x2 p\n";
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t b = 0; b < nb; ++b)
        if (j(s, a, b) != 0.0) {
          out << j.s().label(s) << ' ' << j.x1().label(a) << ' ' << j.x2().label(b) << ' '
              << format_number(j(s, a, b)) << '\n';
        }
}

void write_utility(std::ostream& out, const UtilityTable& u) {
  out << "utility\ns a u\n";
  for (std::size_t s = 0; s < u.states().size(); ++s)
    for (std::size_t a = 0; a < u.actions().size(); ++a)
      out << u.states().label(s) << ' ' << u.actions().label(a) << ' ' << format_number(u(s, a))
          << '\n';
}

Channel read_channel_file(const std::filesystem::path& path) {
  return read_file(path, [](std::istream& in, const std::string& src) { return parse_channel(in, src); });
}

ProbVector read_prior_file(const std::filesystem::path& path) {
  return read_file(path, [](std::istream& in, const std::string& src) { return parse_prior(in, src); });
}

JointDistribution read_joint_file(const std::filesystem::path& path) {
  return read_file(path, [](std::istream& in, const std::string& src) { return parse_joint(in, src); });
}

UtilityTable read_utility_file(const std::filesystem::path& path) {
  return read_file(path, [](std::istream& in, const std::string& src) { return parse_utility(in, src); });
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out.flush()) throw IoError("write to '" + path.string() + "' failed");
}

std::string to_text(const Channel& c) { return text_of(c, &write_channel); }
std::string to_text(const ProbVector& p) { return text_of(p, &write_prior); }
std::string to_text(const JointDistribution& j) { return text_of(j, &write_joint); }
std::string to_text(const UtilityTable& u) { return text_of(u, &write_utility); }

}  // namespace chanorder
