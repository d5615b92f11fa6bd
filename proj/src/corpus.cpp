#include "kginfuse/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "kginfuse/text.hpp"

namespace kginfuse {

CorpusFormat corpus_format_from_string(const std::string& s) {
  if (s == "tsv") return CorpusFormat::Tsv;
  if (s == "csv") return CorpusFormat::Csv;
  throw Error(Error::Code::ParseError, "unknown corpus format: " + s);
}

namespace {

using Record = std::vector<std::string>;

std::vector<Record> parse_tsv(const std::string& data) {
  std::vector<Record> records;
  std::size_t pos = 0;
  while (pos <= data.size()) {
    if (pos == data.size()) break;
    std::size_t eol = data.find('\n', pos);
    std::string line = data.substr(pos, eol == std::string::npos ? std::string::npos
                                                                 : eol - pos);
    pos = eol == std::string::npos ? data.size() : eol + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Record rec;
    std::size_t start = 0;
    for (;;) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        rec.push_back(line.substr(start));
        break;
      }
      rec.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

// RFC 4180 reader; quoted fields may contain delimiters, quotes, and
// line breaks.
std::vector<Record> parse_csv(const std::string& data) {
  std::vector<Record> records;
  Record rec;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_field = [&]() {
    rec.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&]() {
    end_field();
    records.push_back(std::move(rec));
    rec = Record{};
  };
  std::size_t i = 0;
  const std::size_t n = data.size();
  while (i < n) {
    char c = data[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && data[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      field.push_back(c);
      ++i;
      continue;
    }
    if (c == '"' && !field_started && field.empty()) {
      in_quotes = true;
      field_started = true;
      ++i;
      continue;
    }
    if (c == ',') {
      end_field();
      ++i;
      continue;
    }
    if (c == '\r' && i + 1 < n && data[i + 1] == '\n') {
      end_record();
      i += 2;
      continue;
    }
    if (c == '\n' || c == '\r') {
      end_record();
      ++i;
      continue;
    }
    field.push_back(c);
    field_started = true;
    ++i;
  }
  if (field_started || !field.empty() || !rec.empty()) end_record();
  return records;
}

void strip_bom(std::string& s) {
  if (s.size() >= 3 && s.compare(0, 3, "\xef\xbb\xbf") == 0) s.erase(0, 3);
}

bool is_blank_record(const Record& rec) {
  return rec.size() == 1 && rec[0].empty();
}

std::string read_all(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

LabeledCorpus load_corpus(std::istream& in, CorpusFormat format,
                          const std::string& source_name) {
  std::string data = read_all(in);
  strip_bom(data);
  const auto records = format == CorpusFormat::Tsv ? parse_tsv(data) : parse_csv(data);
  if (records.empty() || is_blank_record(records[0])) {
    throw Error(Error::Code::MissingColumn, source_name + ": missing header row");
  }

  const Record& header = records[0];
  std::size_t text_col = header.size();
  std::size_t label_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "text") text_col = i;
    if (header[i] == "label") label_col = i;
  }
  if (text_col == header.size()) {
    throw Error(Error::Code::MissingColumn, source_name + ": no \"text\" column");
  }
  if (label_col == header.size()) {
    throw Error(Error::Code::MissingColumn, source_name + ": no \"label\" column");
  }

  LabeledCorpus corpus;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const Record& rec = records[r];
    if (is_blank_record(rec)) continue;
    if (rec.size() != header.size()) {
      throw Error(Error::Code::ParseError,
                  source_name + ": row " + std::to_string(r + 1) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(rec.size()));
    }
    const std::string label = trim(rec[label_col]);
    if (label != "0" && label != "1") {
      throw Error(Error::Code::BadLabel,
                  source_name + ": row " + std::to_string(r + 1) +
                      ": label must be 0 or 1, got \"" + label + "\"");
    }
    corpus.docs.push_back({rec[text_col], label == "1" ? 1 : 0});
  }
  return corpus;
}

LabeledCorpus load_corpus(const std::string& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Error::Code::IoError, "cannot open corpus file: " + path);
  }
  return load_corpus(in, format, path);
}

namespace {

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string emit_corpus(const LabeledCorpus& corpus, CorpusFormat format) {
  std::string out;
  if (format == CorpusFormat::Tsv) {
    out = "text\tlabel\n";
    for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
      const Document& doc = corpus.docs[i];
      if (doc.text.find_first_of("\t\r\n") != std::string::npos) {
        throw Error(Error::Code::ParseError,
                    "row " + std::to_string(i + 2) +
                        ": text contains tab or newline; TSV cannot represent it, "
                        "use CSV");
      }
      out += doc.text;
      out.push_back('\t');
      out += doc.label == 1 ? '1' : '0';
      out.push_back('\n');
    }
    return out;
  }
  out = "text,label\n";
  for (const Document& doc : corpus.docs) {
    out += csv_quote(doc.text);
    out.push_back(',');
    out += doc.label == 1 ? '1' : '0';
    out.push_back('\n');
  }
  return out;
}

void save_corpus(const LabeledCorpus& corpus, const std::string& path,
                 CorpusFormat format) {
  const std::string data = emit_corpus(corpus, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Error::Code::IoError, "cannot write corpus file: " + path);
  }
  out << data;
}

namespace {

bool matches_at(const std::string& s, std::size_t pos, const char* prefix) {
  for (std::size_t i = 0; prefix[i] != '\0'; ++i) {
    if (pos + i >= s.size()) return false;
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) return false;
  }
  return true;
}

bool is_word_char(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || c == '_';
}

std::string replace_urls(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (matches_at(s, i, "http://") || matches_at(s, i, "https://") ||
        matches_at(s, i, "www.")) {
      // Stop at parentheses so an adjoining echo symbol is never consumed.
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) &&
             s[i] != '(' && s[i] != ')') {
        ++i;
      }
      out += "<url>";
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::string replace_mentions(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '@' && i + 1 < s.size() && is_word_char(s[i + 1])) {
      ++i;
      while (i < s.size() && is_word_char(s[i])) ++i;
      out += "<user>";
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::string collapse_whitespace(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      out.push_back(' ');
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

}  // namespace

std::string preprocess(const std::string& text, const PreprocessConfig& config) {
  std::string out = text;
  if (config.lowercase) out = to_lower(out);
  if (config.replace_urls) out = replace_urls(out);
  if (config.replace_mentions) out = replace_mentions(out);
  if (config.collapse_whitespace) out = collapse_whitespace(out);
  return out;
}

LabeledCorpus preprocess_corpus(const LabeledCorpus& corpus,
                                const PreprocessConfig& config) {
  LabeledCorpus out;
  out.docs.reserve(corpus.docs.size());
  for (const Document& doc : corpus.docs) {
    out.docs.push_back({preprocess(doc.text, config), doc.label});
  }
  return out;
}

}  // namespace kginfuse
