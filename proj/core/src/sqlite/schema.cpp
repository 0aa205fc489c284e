#include "imtriage/sqlite/schema.hpp"

#include <algorithm>
#include <cctype>

namespace imtriage::sqlite {

namespace {

struct Token {
  std::string text;
  bool quoted = false;
  bool is_punct = false;  // one of ( ) ,
};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<Token> tokenize(std::string_view sql) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < sql.size()) {
    const char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '-' && i + 1 < sql.size() && sql[i + 1] == '-') {
      while (i < sql.size() && sql[i] != '\n') ++i;
    } else if (c == '/' && i + 1 < sql.size() && sql[i + 1] == '*') {
      const auto end = sql.find("*/", i + 2);
      i = end == std::string_view::npos ? sql.size() : end + 2;
    } else if (c == '(' || c == ')' || c == ',') {
      out.push_back({std::string(1, c), false, true});
      ++i;
    } else if (c == '"' || c == '`' || c == '\'' || c == '[') {
      const char close = c == '[' ? ']' : c;
      std::size_t j = i + 1;
      while (j < sql.size()) {
        if (sql[j] == close) {
          if (close != ']' && j + 1 < sql.size() && sql[j + 1] == close) {
            j += 2;
            continue;
          }
          break;
        }
        ++j;
      }
      const std::size_t end = std::min(j + 1, sql.size());
      out.push_back({std::string(sql.substr(i, end - i)), true, false});
      i = end;
    } else {
      std::size_t j = i;
      while (j < sql.size()) {
        const char d = sql[j];
        if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ',' ||
            d == '"' || d == '`' || d == '\'' || d == '[') {
          break;
        }
        ++j;
      }
      out.push_back({std::string(sql.substr(i, j - i)), false, false});
      i = j;
    }
  }
  return out;
}

bool is_keyword(const Token& t, std::string_view kw) {
  return !t.quoted && !t.is_punct && upper(t.text) == kw;
}

bool starts_constraint(const Token& t) {
  static constexpr std::string_view kWords[] = {"CONSTRAINT", "PRIMARY", "NOT",      "NULL",
                                                "UNIQUE",     "CHECK",   "DEFAULT",  "COLLATE",
                                                "REFERENCES", "GENERATED", "AS"};
  return std::any_of(std::begin(kWords), std::end(kWords),
                     [&](std::string_view kw) { return is_keyword(t, kw); });
}

}  // namespace

std::string unquote_identifier(std::string_view token) {
  if (token.size() >= 2) {
    const char open = token.front();
    const char close = token.back();
    if ((open == '"' && close == '"') || (open == '`' && close == '`') ||
        (open == '\'' && close == '\'')) {
      std::string out;
      for (std::size_t i = 1; i + 1 < token.size(); ++i) {
        out += token[i];
        if (token[i] == open && i + 2 < token.size() && token[i + 1] == open) ++i;
      }
      return out;
    }
    if (open == '[' && close == ']') return std::string(token.substr(1, token.size() - 2));
  }
  return std::string(token);
}

CreateTable parse_create_table(std::string_view ddl) {
  CreateTable out;
  const auto tokens = tokenize(ddl);
  std::size_t i = 0;
  if (i < tokens.size() && is_keyword(tokens[i], "CREATE")) ++i;
  while (i < tokens.size() && !is_keyword(tokens[i], "TABLE")) {
    if (is_keyword(tokens[i], "VIRTUAL")) out.is_virtual = true;
    ++i;
  }
  if (out.is_virtual) return out;
  // Skip to the opening parenthesis of the column list (an AS SELECT form has
  // none at depth zero before SELECT).
  while (i < tokens.size() && !(tokens[i].is_punct && tokens[i].text == "(")) {
    if (is_keyword(tokens[i], "AS")) return out;
    ++i;
  }
  if (i >= tokens.size()) return out;
  ++i;

  // Split the column list into top-level items.
  std::vector<std::vector<Token>> items(1);
  int depth = 0;
  for (; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.is_punct && t.text == "(") ++depth;
    if (t.is_punct && t.text == ")") {
      if (depth == 0) break;
      --depth;
    }
    if (depth == 0 && t.is_punct && t.text == ",") {
      items.emplace_back();
      continue;
    }
    items.back().push_back(t);
  }
  for (std::size_t j = i + 1; j + 1 < tokens.size(); ++j) {
    if (is_keyword(tokens[j], "WITHOUT") && is_keyword(tokens[j + 1], "ROWID")) {
      out.without_rowid = true;
    }
  }

  std::vector<std::string> table_pk;
  for (const auto& item : items) {
    if (item.empty()) continue;
    const Token& head = item.front();
    if (is_keyword(head, "CONSTRAINT") || is_keyword(head, "PRIMARY") ||
        is_keyword(head, "UNIQUE") || is_keyword(head, "CHECK") || is_keyword(head, "FOREIGN")) {
      for (std::size_t k = 0; k + 1 < item.size(); ++k) {
        if (is_keyword(item[k], "PRIMARY") && is_keyword(item[k + 1], "KEY")) {
          for (std::size_t m = k + 2; m < item.size(); ++m) {
            if (item[m].is_punct && item[m].text == ")") break;
            if (item[m].is_punct) continue;
            if (is_keyword(item[m], "ASC") || is_keyword(item[m], "DESC") ||
                is_keyword(item[m], "COLLATE")) {
              continue;
            }
            table_pk.push_back(unquote_identifier(item[m].text));
          }
        }
      }
      continue;
    }

    ColumnDef col;
    col.name = unquote_identifier(head.text);
    std::size_t k = 1;
    std::string type;
    int tdepth = 0;
    for (; k < item.size(); ++k) {
      if (tdepth == 0 && starts_constraint(item[k])) break;
      if (item[k].is_punct && item[k].text == "(") ++tdepth;
      if (item[k].is_punct && item[k].text == ")") --tdepth;
      if (!type.empty() && !item[k].is_punct && type.back() != '(') type += ' ';
      type += item[k].text;
    }
    col.declared_type = type;
    bool pk = false;
    bool desc = false;
    bool generated = false;
    bool stored_generated = false;
    for (; k < item.size(); ++k) {
      if (k + 1 < item.size() && is_keyword(item[k], "PRIMARY") &&
          is_keyword(item[k + 1], "KEY")) {
        pk = true;
        if (k + 2 < item.size() && is_keyword(item[k + 2], "DESC")) desc = true;
      }
      if (is_keyword(item[k], "AS") || is_keyword(item[k], "GENERATED")) generated = true;
      if (is_keyword(item[k], "STORED")) stored_generated = true;
    }
    col.rowid_alias = pk && !desc && upper(col.declared_type) == "INTEGER";
    col.stored = !generated || stored_generated;
    out.columns.push_back(std::move(col));
  }

  if (table_pk.size() == 1) {
    for (auto& col : out.columns) {
      if (col.name == table_pk.front() && upper(col.declared_type) == "INTEGER") {
        col.rowid_alias = true;
      }
    }
  }
  if (out.without_rowid) {
    for (auto& col : out.columns) col.rowid_alias = false;
  }
  return out;
}

}  // namespace imtriage::sqlite
