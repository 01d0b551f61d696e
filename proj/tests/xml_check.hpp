#pragma once

#include <cctype>
#include <regex>
#include <string>
#include <vector>

// Minimal XML well-formedness checker used as an independent oracle for
// the SVG output: balanced tags, quoted attributes, legal entities.
namespace treeviz::testing {

inline bool xml_well_formed(const std::string& doc, std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  std::vector<std::string> stack;
  std::size_t i = 0;
  const std::size_t n = doc.size();
  bool seen_root = false;

  auto skip_ws = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(doc[i]))) ++i;
  };
  auto read_name = [&]() -> std::string {
    std::string name;
    while (i < n && (std::isalnum(static_cast<unsigned char>(doc[i])) ||
                     doc[i] == ':' || doc[i] == '-' || doc[i] == '_' ||
                     doc[i] == '.')) {
      name += doc[i++];
    }
    return name;
  };

  while (i < n) {
    if (doc[i] == '<') {
      ++i;
      if (i < n && doc[i] == '?') {  // prolog
        const auto end = doc.find("?>", i);
        if (end == std::string::npos) return fail("unterminated prolog");
        i = end + 2;
        continue;
      }
      if (i < n && doc[i] == '/') {  // closing tag
        ++i;
        const std::string name = read_name();
        skip_ws();
        if (i >= n || doc[i] != '>') return fail("bad closing tag");
        ++i;
        if (stack.empty() || stack.back() != name) {
          return fail("mismatched closing tag: " + name);
        }
        stack.pop_back();
        continue;
      }
      const std::string name = read_name();
      if (name.empty()) return fail("empty tag name");
      if (stack.empty() && seen_root) return fail("multiple roots");
      seen_root = true;
      // attributes
      bool self_closed = false;
      while (true) {
        skip_ws();
        if (i >= n) return fail("unterminated tag: " + name);
        if (doc[i] == '>') {
          ++i;
          break;
        }
        if (doc[i] == '/') {
          ++i;
          if (i >= n || doc[i] != '>') return fail("bad self-close");
          ++i;
          self_closed = true;
          break;
        }
        const std::string attr = read_name();
        if (attr.empty()) return fail("bad attribute in <" + name + ">");
        skip_ws();
        if (i >= n || doc[i] != '=') return fail("attribute without value");
        ++i;
        skip_ws();
        if (i >= n || doc[i] != '"') return fail("unquoted attribute value");
        ++i;
        while (i < n && doc[i] != '"') {
          if (doc[i] == '<') return fail("'<' inside attribute value");
          ++i;
        }
        if (i >= n) return fail("unterminated attribute value");
        ++i;
      }
      if (!self_closed) stack.push_back(name);
      continue;
    }
    if (doc[i] == '&') {  // entity
      const auto semi = doc.find(';', i);
      if (semi == std::string::npos || semi - i > 8) return fail("bad entity");
      const std::string ent = doc.substr(i + 1, semi - i - 1);
      if (ent != "amp" && ent != "lt" && ent != "gt" && ent != "quot" &&
          ent != "apos" && (ent.empty() || ent[0] != '#')) {
        return fail("unknown entity: " + ent);
      }
      i = semi + 1;
      continue;
    }
    if (doc[i] == '>') return fail("stray '>'");
    ++i;
  }
  if (!stack.empty()) return fail("unclosed tag: " + stack.back());
  if (!seen_root) return fail("no root element");
  return true;
}

// fill/stroke tokens emitted by the renderer
inline bool valid_color_token(const std::string& token) {
  if (token == "none") return true;
  static const std::regex re("rgb\\((\\d{1,3}),(\\d{1,3}),(\\d{1,3})\\)");
  std::smatch m;
  if (!std::regex_match(token, m, re)) return false;
  for (int g = 1; g <= 3; ++g) {
    if (std::stoi(m[g]) > 255) return false;
  }
  return true;
}

inline bool svg_colors_valid(const std::string& doc, std::string* bad = nullptr) {
  static const std::regex attr_re("(?:fill|stroke)=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(doc.begin(), doc.end(), attr_re);
       it != std::sregex_iterator(); ++it) {
    const std::string token = (*it)[1];
    if (!valid_color_token(token)) {
      if (bad) *bad = token;
      return false;
    }
  }
  return true;
}

}  // namespace treeviz::testing
