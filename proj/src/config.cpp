#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hk/catalog.hpp"
#include "hk/suite.hpp"

namespace hk {

namespace {

struct Value {
  enum Kind { Num, Str, List } kind = Num;
  double num = 0.0;
  std::string str;
  std::vector<Value> items;
  int col = 0;
};

class LineParser {
 public:
  LineParser(const std::string& s, int line) : s_(s), line_(line) {}

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw ConfigError(msg, line_, static_cast<int>(at) + 1);
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool done() {
    skip();
    return i_ >= s_.size() || s_[i_] == '#';
  }
  std::size_t pos() const { return i_; }

  std::string ident() {
    skip();
    std::size_t b = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    if (b == i_) fail("expected a key", b);
    return s_.substr(b, i_ - b);
  }
  void expect(char c) {
    skip();
    if (i_ >= s_.size() || s_[i_] != c) fail(std::string("expected '") + c + "'", i_);
    ++i_;
  }

  Value value() {
    skip();
    Value v;
    v.col = static_cast<int>(i_) + 1;
    if (i_ >= s_.size()) fail("missing value", i_);
    char c = s_[i_];
    if (c == '"') {
      v.kind = Value::Str;
      ++i_;
      for (;;) {
        if (i_ >= s_.size()) fail("unterminated string", static_cast<std::size_t>(v.col - 1));
        char d = s_[i_++];
        if (d == '"') break;
        if (d == '\\' && i_ < s_.size()) d = s_[i_++];
        v.str += d;
      }
    } else if (c == '[') {
      v.kind = Value::List;
      ++i_;
      skip();
      if (i_ < s_.size() && s_[i_] == ']') {
        ++i_;
        return v;
      }
      for (;;) {
        v.items.push_back(value());
        skip();
        if (i_ < s_.size() && s_[i_] == ',') {
          ++i_;
          continue;
        }
        expect(']');
        break;
      }
    } else {
      const char* b = s_.c_str() + i_;
      char* e = nullptr;
      v.num = std::strtod(b, &e);
      if (e == b) fail("expected a number, a quoted string or a list", i_);
      i_ += static_cast<std::size_t>(e - b);
    }
    return v;
  }

 private:
  const std::string& s_;
  int line_;
  std::size_t i_ = 0;
};

double as_num(const Value& v, int line) {
  if (v.kind != Value::Num) throw ConfigError("expected a number", line, v.col);
  return v.num;
}
long as_int(const Value& v, int line, long lo, long hi) {
  double d = as_num(v, line);
  if (d != std::floor(d) || d < lo || d > hi)
    throw ConfigError("expected an integer in " + std::to_string(lo) + ".." + std::to_string(hi), line, v.col);
  return static_cast<long>(d);
}
std::string as_str(const Value& v, int line) {
  if (v.kind != Value::Str) throw ConfigError("expected a quoted string", line, v.col);
  return v.str;
}
// a quoted expression; syntax errors point into the string
std::string as_expr(const Value& v, int line) {
  std::string s = as_str(v, line);
  if (s == "inf") return s;
  try {
    parse_expr(s);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("bad expression: ") + e.what(), line, v.col + e.col);
  }
  return s;
}
std::vector<std::string> as_exprs(const Value& v, int line) {
  if (v.kind != Value::List) throw ConfigError("expected a list of quoted expressions", line, v.col);
  std::vector<std::string> r;
  for (const auto& it : v.items) r.push_back(as_expr(it, line));
  return r;
}
std::vector<double> as_nums(const Value& v, int line) {
  if (v.kind != Value::List) throw ConfigError("expected a list of numbers", line, v.col);
  std::vector<double> r;
  for (const auto& it : v.items) r.push_back(as_num(it, line));
  return r;
}

void assign(Config& c, const std::string& sec, const std::string& key, const Value& v, int line, int kcol) {
  SpaceSpec& s = c.space;
  if (sec == "space") {
    if (key == "kind") {
      s.kind = as_str(v, line);
      const auto& ks = catalog_kinds();
      if (std::find(ks.begin(), ks.end(), s.kind) == ks.end())
        throw ConfigError("unknown space kind '" + s.kind + "'", line, v.col);
    } else if (key == "n")
      s.n = static_cast<int>(as_int(v, line, 1, 4));
    else if (key == "k")
      s.k = static_cast<int>(as_int(v, line, 2, 4));
    else if (key == "m")
      s.m = as_num(v, line);
    else if (key == "c")
      s.c = as_num(v, line);
    else if (key == "e")
      s.e = as_num(v, line);
    else if (key == "gamma")
      s.gamma = as_exprs(v, line);
    else if (key == "b")
      s.b = as_exprs(v, line);
    else if (key == "a")
      s.a = as_exprs(v, line);
    else if (key == "index")
      s.index = as_expr(v, line);
    else if (key == "sigma")
      s.sigma = as_expr(v, line);
    else if (key == "hamiltonian")
      s.hamiltonian = as_expr(v, line);
    else
      throw ConfigError("unknown key '" + key + "' in [space]", line, kcol);
  } else if (sec == "suite") {
    if (key == "name") {
      c.suite.name = as_str(v, line);
      const auto& ns = suite_names();
      if (std::find(ns.begin(), ns.end(), c.suite.name) == ns.end())
        throw ConfigError("unknown suite '" + c.suite.name + "'", line, v.col);
    } else if (key == "seed")
      c.suite.seed = static_cast<std::uint64_t>(as_int(v, line, 0, 1L << 52));
    else if (key == "points")
      c.suite.points = static_cast<int>(as_int(v, line, 1, 100000));
    else
      throw ConfigError("unknown key '" + key + "' in [suite]", line, kcol);
  } else if (sec == "integrate") {
    IntegrateSpec& g = c.integrate;
    if (key == "t1" || key == "step") {
      double d = as_num(v, line);
      if (!(d > 0.0)) throw ConfigError(key + " must be positive", line, v.col);
      (key == "t1" ? g.t1 : g.step) = d;
    } else if (key == "x0")
      g.x0 = as_nums(v, line);
    else if (key == "p0")
      g.p0 = as_nums(v, line);
    else if (key == "out")
      g.out = as_str(v, line);
    else
      throw ConfigError("unknown key '" + key + "' in [integrate]", line, kcol);
  } else {
    throw ConfigError("key outside of a section", line, kcol);
  }
  c.where[key] = {line, v.col};
}

}  // namespace

Config parse_config(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string raw, sec;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    LineParser p(raw, line);
    if (p.done()) continue;
    if (raw[p.pos()] == '[') {
      p.expect('[');
      std::size_t at = p.pos();
      sec = p.ident();
      if (sec != "space" && sec != "suite" && sec != "integrate") p.fail("unknown section [" + sec + "]", at);
      p.expect(']');
      if (!p.done()) p.fail("unexpected text after section header", p.pos());
      continue;
    }
    p.skip();
    int kcol = static_cast<int>(p.pos()) + 1;
    std::string key = p.ident();
    p.expect('=');
    Value v = p.value();
    if (!p.done()) p.fail("unexpected text after value", p.pos());
    assign(c, sec, key, v, line, kcol);
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path, 0, 0);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace hk
