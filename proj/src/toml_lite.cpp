#include "cylspec/toml_lite.hpp"

#include "cylspec/error.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace cylspec {

using ojson = nlohmann::ordered_json;

namespace {

class Reader {
public:
  explicit Reader(std::string_view s) : s_(s) {}

  ojson document() {
    ojson root = ojson::object();
    ojson* table = &root;
    for (;;) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++i_;
        skip_ws();
        const std::string name = key();
        skip_ws();
        expect(']');
        if (root.contains(name)) fail("duplicate table [" + name + "]");
        root[name] = ojson::object();
        table = &root[name];
      } else {
        const std::string k = key();
        skip_ws();
        expect('=');
        skip_ws();
        ojson v = value();
        if (table->contains(k)) fail("duplicate key '" + k + "'");
        (*table)[k] = std::move(v);
      }
      end_of_line();
    }
    return root;
  }

private:
  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[i_]; }

  [[noreturn]] void fail(const std::string& what) const {
    int line = 1;
    for (std::size_t j = 0; j < i_ && j < s_.size(); ++j)
      if (s_[j] == '\n') ++line;
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++i_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++i_;
  }

  // Whitespace, comments and newlines; used inside arrays and between lines.
  void skip_blank_lines() {
    for (;;) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        ++i_;
        continue;
      }
      return;
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (eof()) return;
    if (peek() == '\r') ++i_;
    if (peek() != '\n') fail("unexpected trailing characters");
    ++i_;
  }

  std::string key() {
    if (peek() == '"') return string();
    const std::size_t b = i_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++i_;
    if (i_ == b) fail("expected a key");
    return std::string(s_.substr(b, i_ - b));
  }

  std::string string() {
    expect('"');
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = s_[i_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated string");
      const char e = s_[i_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unknown escape \\") + e);
      }
    }
  }

  ojson value() {
    const char c = peek();
    if (c == '"') return string();
    if (c == '[') return array();
    if (c == '{') return inline_table();
    if (s_.substr(i_, 4) == "true") {
      i_ += 4;
      return true;
    }
    if (s_.substr(i_, 5) == "false") {
      i_ += 5;
      return false;
    }
    return number();
  }

  ojson array() {
    expect('[');
    ojson a = ojson::array();
    for (;;) {
      skip_blank_lines();
      if (peek() == ']') {
        ++i_;
        return a;
      }
      a.push_back(value());
      skip_blank_lines();
      if (peek() == ',') {
        ++i_;
        continue;
      }
      if (peek() != ']') fail("expected ',' or ']' in array");
    }
  }

  ojson inline_table() {
    expect('{');
    ojson t = ojson::object();
    skip_ws();
    if (peek() == '}') {
      ++i_;
      return t;
    }
    for (;;) {
      skip_ws();
      const std::string k = key();
      skip_ws();
      expect('=');
      skip_ws();
      if (t.contains(k)) fail("duplicate key '" + k + "'");
      t[k] = value();
      skip_ws();
      if (peek() == ',') {
        ++i_;
        continue;
      }
      expect('}');
      return t;
    }
  }

  ojson number() {
    const std::size_t b = i_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                      peek() == '.' || peek() == '_'))
      ++i_;
    std::string tok;
    for (char c : s_.substr(b, i_ - b))
      if (c != '_') tok += c;
    if (tok.empty()) fail("expected a value");
    const std::string body = tok[0] == '+' ? tok.substr(1) : tok;
    if (body == "inf" || body == "-inf" || body == "nan" || body == "-nan")
      fail("non-finite numbers are not allowed");
    const bool is_float = body.find_first_of(".eE") != std::string::npos;
    const char* first = body.data();
    const char* last = body.data() + body.size();
    if (!is_float) {
      long long v = 0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec == std::errc() && p == last) return v;
    }
    double d = 0.0;
    auto [p, ec] = std::from_chars(first, last, d);
    if (ec != std::errc() || p != last) fail("malformed value '" + tok + "'");
    return d;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace

ojson parse_toml_lite(std::string_view text) { return Reader(text).document(); }

ojson read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    try {
      return ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("malformed JSON config: ") + e.what());
    }
  }
  return parse_toml_lite(text);
}

}  // namespace cylspec
