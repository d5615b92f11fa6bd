#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kginfuse/error.hpp"

namespace kginfuse {

// Closed taxonomy; any other type string is a load-time error.
enum class EntryType {
  Event,
  Place,
  Person,
  Date,
  Publication,
  Organization,
  Product,
  Slur,
};

inline constexpr std::array<EntryType, 8> kAllEntryTypes = {
    EntryType::Event,       EntryType::Place,   EntryType::Person,
    EntryType::Date,        EntryType::Publication, EntryType::Organization,
    EntryType::Product,     EntryType::Slur,
};

const char* to_string(EntryType type);
std::optional<EntryType> parse_entry_type(const std::string& s);

// Whether infusion renders the entry's description (date/place entries
// expand their events instead).
bool has_description_requirement(EntryType type);

// One graph entry. Empty string/vector means the field was absent; the
// date/location/author/events lists hold lowercase keys of other entries.
// Fields outside the known schema are preserved opaquely in extra and
// written back on emit.
struct Entry {
  EntryType type = EntryType::Event;
  std::string description;
  std::vector<std::string> date;
  std::vector<std::string> location;
  std::vector<std::string> author;
  std::vector<std::string> events;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const Entry& other) const = default;
};

// Immutable after load; keys are lowercase and trimmed, and std::map makes
// iteration order deterministic.
struct KnowledgeGraph {
  std::map<std::string, Entry> entries;
  std::string source;

  bool contains(const std::string& key) const { return entries.count(key) > 0; }
};

enum class FindingCode {
  UnknownType,
  MissingDescription,
  EmptyKey,
  MalformedField,
  DanglingReference,
  DuplicateAlias,
};

const char* to_string(FindingCode code);

struct Finding {
  std::string key;
  FindingCode code;
  std::string message;

  bool operator==(const Finding& other) const = default;
};

struct ValidationReport {
  std::vector<Finding> errors;
  std::vector<Finding> warnings;

  bool ok() const { return errors.empty(); }
};

struct TypeCounts {
  std::array<std::size_t, 8> by_type{};
  std::size_t total = 0;

  std::size_t count(EntryType type) const {
    return by_type[static_cast<std::size_t>(type)];
  }
};

// Parses the graph file: a JSON object mapping entry keys to objects with a
// required "type" and optional "description"/"date"/"location"/"author"/
// "events" fields. Keys and reference lists are lowercased and trimmed;
// descriptions are kept verbatim. Throws Error with code ParseError,
// MissingType, or UnknownType.
KnowledgeGraph load_graph(const std::string& path);
KnowledgeGraph load_graph(std::istream& in, const std::string& source_name = "<stream>");
KnowledgeGraph load_graph_from_string(const std::string& text,
                                      const std::string& source_name = "<string>");

// Serializes a graph back to the file format; load(emit(g)) == g.
std::string emit_graph(const KnowledgeGraph& kg);

// Checks every Entry and KnowledgeGraph invariant, reporting findings
// instead of throwing. Dangling references and duplicate aliases are
// warnings. Pure: identical graphs yield identical reports.
ValidationReport validate_graph(const KnowledgeGraph& kg);

// Lenient file-level validation: entries with a missing, malformed, or
// unknown type become error findings rather than exceptions, and the
// remaining entries are validated as a graph. Reference targets are looked
// up against all keys in the file, including invalid ones.
ValidationReport validate_graph_file(const std::string& path);

TypeCounts graph_stats(const KnowledgeGraph& kg);

}  // namespace kginfuse
