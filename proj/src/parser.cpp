#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "tpref/errors.hpp"
#include "tpref/formula.hpp"

namespace tpref {

namespace {

std::string strip_comment_lines(const std::string& text) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    out += line;
    out += '\n';
  }
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct Token {
  enum Kind { kIdent, kLe, kGt, kAmp, kPipe, kSemi, kBang, kEnd } kind;
  std::string text;
  size_t pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    size_t start = pos_;
    if (pos_ >= text_.size()) {
      tok_ = {Token::kEnd, "", start};
      return;
    }
    char c = text_[pos_];
    switch (c) {
      case '>': ++pos_; tok_ = {Token::kGt, ">", start}; return;
      case '&': ++pos_; tok_ = {Token::kAmp, "&", start}; return;
      case '|': ++pos_; tok_ = {Token::kPipe, "|", start}; return;
      case ';': ++pos_; tok_ = {Token::kSemi, ";", start}; return;
      case '!': ++pos_; tok_ = {Token::kBang, "!", start}; return;
      case '<':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
          pos_ += 2;
          tok_ = {Token::kLe, "<=", start};
          return;
        }
        fail(ErrorKind::kSyntaxError,
             "expected '<=' at offset " + std::to_string(start));
      default: break;
    }
    size_t end = pos_;
    while (end < text_.size()) {
      char d = text_[end];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '>' ||
          d == '&' || d == '|' || d == ';' || d == '!' || d == '<' || d == ',')
        break;
      ++end;
    }
    if (end == pos_)
      fail(ErrorKind::kSyntaxError,
           std::string("unexpected character '") + c + "' at offset " +
               std::to_string(start));
    tok_ = {Token::kIdent, text_.substr(pos_, end - pos_), start};
    pos_ = end;
  }

  const std::string& text_;
  size_t pos_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(const std::string& text, SchemaPtr schema)
      : lex_(text), schema_(std::move(schema)) {}

  Formula parse() {
    Formula f;
    f.schema = schema_;
    int n = 0;
    f.statements.push_back(statement("P" + std::to_string(++n)));
    while (lex_.peek().kind == Token::kSemi) {
      lex_.take();
      if (lex_.peek().kind == Token::kEnd) break;  // trailing separator
      f.statements.push_back(statement("P" + std::to_string(++n)));
    }
    if (lex_.peek().kind != Token::kEnd)
      fail(ErrorKind::kSyntaxError, "unexpected '" + lex_.peek().text +
                                        "' at offset " +
                                        std::to_string(lex_.peek().pos));
    return f;
  }

 private:
  Statement statement(std::string id) {
    Statement s;
    s.id = std::move(id);
    s.clauses.push_back(clause(s.id));
    while (lex_.peek().kind == Token::kPipe) {
      lex_.take();
      s.clauses.push_back(clause(s.id));
    }
    return s;
  }

  Clause clause(const std::string& id) {
    Clause c;
    c.better = conj();
    if (lex_.peek().kind != Token::kGt)
      fail(ErrorKind::kSyntaxError,
           "expected '>' in statement " + id + " at offset " +
               std::to_string(lex_.peek().pos));
    lex_.take();
    c.worse = conj();
    normalize_clause(*schema_, c);
    if (!clause_satisfiable(*schema_, c))
      fail(ErrorKind::kUnsatisfiableClause,
           "contradictory clause in statement " + id);
    return c;
  }

  std::vector<Predicate> conj() {
    std::vector<Predicate> preds{pred()};
    while (lex_.peek().kind == Token::kAmp) {
      lex_.take();
      preds.push_back(pred());
    }
    return preds;
  }

  Predicate pred() {
    Predicate p;
    if (lex_.peek().kind == Token::kBang) {
      lex_.take();
      p.polarity = Polarity::kNotLeq;
    }
    Token first = expect_ident();
    if (lex_.peek().kind == Token::kLe) {
      lex_.take();
      Token value = expect_ident();
      auto idx = schema_->attr_index(first.text);
      if (!idx)
        fail(ErrorKind::kSyntaxError, "unknown attribute '" + first.text +
                                          "' at offset " +
                                          std::to_string(first.pos));
      p.attr = static_cast<uint32_t>(*idx);
      p.value = schema_->attr(*idx).taxonomy->value_id(value.text);
      return p;
    }
    // Bare value: resolve against the unique taxonomy containing it.
    std::optional<size_t> found;
    std::optional<ValueId> value;
    for (size_t i = 0; i < schema_->size(); ++i) {
      auto v = schema_->attr(i).taxonomy->find_value(first.text);
      if (!v) continue;
      if (found)
        fail(ErrorKind::kAmbiguousBareValue,
             "value '" + first.text + "' occurs in taxonomies of '" +
                 schema_->attr(*found).name + "' and '" +
                 schema_->attr(i).name + "'");
      found = i;
      value = v;
    }
    if (!found)
      fail(ErrorKind::kUnknownValue,
           "value '" + first.text + "' not found in any bound taxonomy");
    p.attr = static_cast<uint32_t>(*found);
    p.value = *value;
    return p;
  }

  Token expect_ident() {
    if (lex_.peek().kind != Token::kIdent)
      fail(ErrorKind::kSyntaxError,
           "expected identifier at offset " + std::to_string(lex_.peek().pos));
    return lex_.take();
  }

  Lexer lex_;
  SchemaPtr schema_;
};

}  // namespace

Formula parse_formula(const std::string& text, SchemaPtr schema) {
  return Parser(strip_comment_lines(text), std::move(schema)).parse();
}

Formula load_formula_file(const std::string& path, SchemaPtr schema) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIoError, "cannot open formula file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_formula(ss.str(), std::move(schema));
}

std::string to_string(const Predicate& p, const Schema& schema) {
  std::string out;
  if (p.polarity == Polarity::kNotLeq) out += '!';
  const auto& attr = schema.attr(p.attr);
  out += attr.name;
  out += "<=";
  out += attr.taxonomy->value_name(p.value);
  return out;
}

namespace {

std::string conj_to_string(const std::vector<Predicate>& conj,
                           const Schema& schema) {
  std::string out;
  for (size_t i = 0; i < conj.size(); ++i) {
    if (i) out += " & ";
    out += to_string(conj[i], schema);
  }
  return out;
}

}  // namespace

std::string to_string(const Clause& c, const Schema& schema) {
  return conj_to_string(c.better, schema) + " > " +
         conj_to_string(c.worse, schema);
}

std::string to_string(const Statement& s, const Schema& schema) {
  std::string out;
  for (size_t i = 0; i < s.clauses.size(); ++i) {
    if (i) out += " | ";
    out += to_string(s.clauses[i], schema);
  }
  return out;
}

std::string to_string(const Formula& f) {
  std::string out;
  for (size_t i = 0; i < f.statements.size(); ++i) {
    if (i) out += " ;\n";
    out += to_string(f.statements[i], *f.schema);
  }
  out += '\n';
  return out;
}

std::shared_ptr<const Schema> Schema::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIoError, "cannot open schema file " + path);
  std::string dir;
  size_t slash = path.find_last_of('/');
  if (slash != std::string::npos) dir = path.substr(0, slash + 1);

  std::vector<Schema::Attribute> attrs;
  std::map<std::string, std::shared_ptr<const Taxonomy>> cache;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::kMalformedLine,
           path + ":" + std::to_string(lineno) + ": expected 'attribute = taxonomy-file'");
    std::string name = trim(t.substr(0, eq));
    std::string file = trim(t.substr(eq + 1));
    if (name.empty() || file.empty())
      fail(ErrorKind::kMalformedLine,
           path + ":" + std::to_string(lineno) + ": empty attribute or path");
    std::string full = (!file.empty() && file[0] == '/') ? file : dir + file;
    auto it = cache.find(full);
    if (it == cache.end()) {
      it = cache.emplace(full, std::make_shared<Taxonomy>(Taxonomy::load_file(full)))
               .first;
    }
    attrs.push_back({name, it->second});
  }
  return std::make_shared<Schema>(std::move(attrs));
}

TRelation load_relation(std::istream& in, SchemaPtr schema,
                        const std::string& where) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
      size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    return cells;
  };

  TRelation rel;
  rel.schema = schema;
  std::string line;
  size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line);
    if (!header_seen) {
      if (cells.size() != schema->size())
        fail(ErrorKind::kMalformedLine,
             where + ":" + std::to_string(lineno) + ": header has " +
                 std::to_string(cells.size()) + " columns, schema has " +
                 std::to_string(schema->size()));
      for (size_t i = 0; i < cells.size(); ++i)
        if (trim(cells[i]) != schema->attr(i).name)
          fail(ErrorKind::kMalformedLine,
               where + ":" + std::to_string(lineno) + ": header column '" +
                   cells[i] + "' does not match attribute '" +
                   schema->attr(i).name + "'");
      header_seen = true;
      continue;
    }
    if (cells.size() != schema->size())
      fail(ErrorKind::kMalformedLine,
           where + ":" + std::to_string(lineno) + ": expected " +
               std::to_string(schema->size()) + " cells");
    TTuple t(schema->size());
    for (size_t i = 0; i < cells.size(); ++i)
      t[i] = schema->attr(i).taxonomy->value_id(cells[i]);
    rel.tuples.push_back(std::move(t));
  }
  if (!header_seen)
    fail(ErrorKind::kMalformedLine, where + ": missing header row");
  return rel;
}

TRelation load_relation_file(const std::string& path, SchemaPtr schema) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIoError, "cannot open data file " + path);
  return load_relation(in, std::move(schema), path);
}

void save_relation(std::ostream& out, const TRelation& rel) {
  const Schema& schema = *rel.schema;
  for (size_t i = 0; i < schema.size(); ++i) {
    if (i) out << ',';
    out << schema.attr(i).name;
  }
  out << '\n';
  for (const auto& t : rel.tuples) {
    for (size_t i = 0; i < t.size(); ++i) {
      if (i) out << ',';
      out << schema.attr(i).taxonomy->value_name(t[i]);
    }
    out << '\n';
  }
}

}  // namespace tpref
