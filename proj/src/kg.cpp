#include "kginfuse/kg.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "kginfuse/text.hpp"

namespace kginfuse {

const char* to_string(EntryType type) {
  switch (type) {
    case EntryType::Event: return "event";
    case EntryType::Place: return "place";
    case EntryType::Person: return "person";
    case EntryType::Date: return "date";
    case EntryType::Publication: return "publication";
    case EntryType::Organization: return "organization";
    case EntryType::Product: return "product";
    case EntryType::Slur: return "slur";
  }
  return "?";
}

std::optional<EntryType> parse_entry_type(const std::string& s) {
  for (EntryType t : kAllEntryTypes) {
    if (s == to_string(t)) return t;
  }
  return std::nullopt;
}

bool has_description_requirement(EntryType type) {
  return type != EntryType::Date && type != EntryType::Place;
}

const char* to_string(FindingCode code) {
  switch (code) {
    case FindingCode::UnknownType: return "UnknownType";
    case FindingCode::MissingDescription: return "MissingDescription";
    case FindingCode::EmptyKey: return "EmptyKey";
    case FindingCode::MalformedField: return "MalformedField";
    case FindingCode::DanglingReference: return "DanglingReference";
    case FindingCode::DuplicateAlias: return "DuplicateAlias";
  }
  return "?";
}

namespace {

const char* const kListFields[] = {"date", "location", "author", "events"};

std::vector<std::string>& list_field(Entry& entry, const std::string& name) {
  if (name == "date") return entry.date;
  if (name == "location") return entry.location;
  if (name == "author") return entry.author;
  return entry.events;
}

const std::vector<std::string>& list_field(const Entry& entry, const std::string& name) {
  return list_field(const_cast<Entry&>(entry), name);
}

// Parses one entry object. In strict mode structural problems throw; in
// lenient mode they become findings and the entry is dropped.
std::optional<Entry> parse_entry(const std::string& key, const nlohmann::json& value,
                                 bool strict, std::vector<Finding>* findings) {
  auto fail = [&](Error::Code code, FindingCode finding, const std::string& msg) {
    if (strict) throw Error(code, msg);
    findings->push_back({key, finding, msg});
  };

  if (!value.is_object()) {
    fail(Error::Code::ParseError, FindingCode::MalformedField,
         "entry \"" + key + "\" is not an object");
    return std::nullopt;
  }
  auto type_it = value.find("type");
  if (type_it == value.end()) {
    fail(Error::Code::MissingType, FindingCode::MalformedField,
         "entry \"" + key + "\" has no type field");
    return std::nullopt;
  }
  if (!type_it->is_string()) {
    fail(Error::Code::ParseError, FindingCode::MalformedField,
         "entry \"" + key + "\": type must be a string");
    return std::nullopt;
  }
  auto type = parse_entry_type(type_it->get<std::string>());
  if (!type) {
    fail(Error::Code::UnknownType, FindingCode::UnknownType,
         "entry \"" + key + "\" has unknown type \"" + type_it->get<std::string>() + "\"");
    return std::nullopt;
  }

  Entry entry;
  entry.type = *type;
  for (auto it = value.begin(); it != value.end(); ++it) {
    const std::string& field = it.key();
    if (field == "type") continue;
    if (field == "description") {
      if (!it->is_string()) {
        fail(Error::Code::ParseError, FindingCode::MalformedField,
             "entry \"" + key + "\": description must be a string");
        return std::nullopt;
      }
      entry.description = it->get<std::string>();
      continue;
    }
    bool known_list = false;
    for (const char* name : kListFields) {
      if (field != name) continue;
      known_list = true;
      if (!it->is_array()) {
        fail(Error::Code::ParseError, FindingCode::MalformedField,
             "entry \"" + key + "\": " + field + " must be an array of strings");
        return std::nullopt;
      }
      auto& target = list_field(entry, field);
      for (const auto& elem : *it) {
        if (!elem.is_string()) {
          fail(Error::Code::ParseError, FindingCode::MalformedField,
               "entry \"" + key + "\": " + field + " must contain only strings");
          return std::nullopt;
        }
        target.push_back(trim(to_lower(elem.get<std::string>())));
      }
      break;
    }
    if (!known_list) entry.extra[field] = *it;
  }
  return entry;
}

nlohmann::json parse_document(std::istream& in, const std::string& source_name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw Error(Error::Code::ParseError,
                source_name + ": " + std::string(err.what()));
  }
  if (!doc.is_object()) {
    throw Error(Error::Code::ParseError,
                source_name + ": top level must be a JSON object");
  }
  return doc;
}

// Graph-level invariant checks shared by validate_graph and
// validate_graph_file. resolvable holds every key a reference may target.
void collect_graph_findings(const std::map<std::string, Entry>& entries,
                            const std::set<std::string>& resolvable,
                            ValidationReport& report) {
  std::map<std::string, std::string> first_key_by_description;
  for (const auto& [key, entry] : entries) {
    if (key.empty()) {
      report.errors.push_back({key, FindingCode::EmptyKey, "empty entry key"});
    } else if (key != trim(to_lower(key))) {
      report.errors.push_back(
          {key, FindingCode::MalformedField,
           "key is not lowercase and trimmed: \"" + key + "\""});
    }
    if (has_description_requirement(entry.type) && entry.description.empty()) {
      report.errors.push_back(
          {key, FindingCode::MissingDescription,
           std::string(to_string(entry.type)) + " entry \"" + key +
               "\" has no description"});
    }
    for (const char* field : kListFields) {
      for (const std::string& ref : list_field(entry, field)) {
        if (ref.empty() || ref != trim(to_lower(ref))) {
          report.errors.push_back(
              {key, FindingCode::MalformedField,
               std::string(field) + " of \"" + key +
                   "\" contains a malformed element \"" + ref + "\""});
          continue;
        }
        if (resolvable.count(ref) == 0) {
          report.warnings.push_back(
              {key, FindingCode::DanglingReference,
               std::string(field) + " of \"" + key + "\" references missing key \"" +
                   ref + "\""});
        }
      }
    }
    if (!entry.description.empty()) {
      auto [it, inserted] = first_key_by_description.emplace(entry.description, key);
      if (!inserted) {
        report.warnings.push_back(
            {key, FindingCode::DuplicateAlias,
             "\"" + key + "\" shares its description with \"" + it->second + "\""});
      }
    }
  }
}

}  // namespace

KnowledgeGraph load_graph(std::istream& in, const std::string& source_name) {
  const nlohmann::json doc = parse_document(in, source_name);
  KnowledgeGraph kg;
  kg.source = source_name;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string key = trim(to_lower(it.key()));
    if (key.empty()) {
      throw Error(Error::Code::ParseError, source_name + ": empty entry key");
    }
    if (kg.entries.count(key) > 0) {
      throw Error(Error::Code::ParseError,
                  source_name + ": duplicate key after normalization: \"" + key + "\"");
    }
    auto entry = parse_entry(key, *it, /*strict=*/true, nullptr);
    kg.entries.emplace(key, std::move(*entry));
  }
  return kg;
}

KnowledgeGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Error::Code::IoError, "cannot open graph file: " + path);
  }
  return load_graph(in, path);
}

KnowledgeGraph load_graph_from_string(const std::string& text,
                                      const std::string& source_name) {
  std::istringstream in(text);
  return load_graph(in, source_name);
}

std::string emit_graph(const KnowledgeGraph& kg) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [key, entry] : kg.entries) {
    nlohmann::json obj = entry.extra;
    obj["type"] = to_string(entry.type);
    if (!entry.description.empty()) obj["description"] = entry.description;
    for (const char* field : kListFields) {
      const auto& list = list_field(entry, field);
      if (!list.empty()) obj[field] = list;
    }
    doc[key] = std::move(obj);
  }
  return doc.dump(2);
}

ValidationReport validate_graph(const KnowledgeGraph& kg) {
  ValidationReport report;
  std::set<std::string> keys;
  for (const auto& [key, entry] : kg.entries) keys.insert(key);
  collect_graph_findings(kg.entries, keys, report);
  return report;
}

ValidationReport validate_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Error::Code::IoError, "cannot open graph file: " + path);
  }
  const nlohmann::json doc = parse_document(in, path);

  ValidationReport report;
  std::map<std::string, Entry> valid_entries;
  std::set<std::string> all_keys;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string key = trim(to_lower(it.key()));
    all_keys.insert(key);
    if (key.empty()) {
      report.errors.push_back({key, FindingCode::EmptyKey, "empty entry key"});
      continue;
    }
    auto entry = parse_entry(key, *it, /*strict=*/false, &report.errors);
    if (entry) valid_entries.emplace(key, std::move(*entry));
  }
  collect_graph_findings(valid_entries, all_keys, report);
  return report;
}

TypeCounts graph_stats(const KnowledgeGraph& kg) {
  TypeCounts counts;
  for (const auto& [key, entry] : kg.entries) {
    ++counts.by_type[static_cast<std::size_t>(entry.type)];
    ++counts.total;
  }
  return counts;
}

}  // namespace kginfuse
