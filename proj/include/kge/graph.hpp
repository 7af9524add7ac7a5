#pragma once
// Triple datasets: loading, vocabularies, split encoding, statistics and the
// synthetic ring fixture.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kge {

using Index = std::uint32_t;

struct RawTriple {
    std::string head;
    std::string relation;
    std::string tail;

    friend bool operator==(const RawTriple&, const RawTriple&) = default;
};

struct Triple {
    Index head = 0;
    Index relation = 0;
    Index tail = 0;

    friend bool operator==(const Triple&, const Triple&) = default;
};

/// Dense label <-> index bijection. Indices are assigned in insertion order.
class Vocabulary {
public:
    /// Index of `label`, inserting it at the end if unseen.
    Index intern(std::string_view label);

    /// Throws ArgumentError for unknown labels.
    Index index_of(std::string_view label) const;
    bool contains(std::string_view label) const;
    const std::string& label(Index index) const;

    std::size_t size() const noexcept { return labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.labels_ == b.labels_; }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
    };
    std::unordered_map<std::string, Index, Hash, std::equal_to<>> index_;
    std::vector<std::string> labels_;
};

struct DatasetStats {
    std::size_t n_entities = 0;
    std::size_t n_relations = 0;
    std::size_t n_train = 0;
    std::size_t n_valid = 0;
    std::size_t n_test = 0;

    friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

struct KnowledgeGraph {
    Vocabulary entities;
    Vocabulary relations;
    std::vector<Triple> train;
    std::vector<Triple> validation;
    std::vector<Triple> test;

    /// Encodes with the existing vocabularies; throws ArgumentError on unknown labels.
    Triple encode(const RawTriple& raw) const;
    /// Throws ArgumentError on out-of-range indices.
    RawTriple decode(const Triple& triple) const;
};

struct SplitFiles {
    std::string train = "train.txt";
    std::string valid = "valid.txt";
    std::string test = "test.txt";
};

/// Loads `dir/{train,valid,test}` TSV files. Vocabularies are built in
/// first-appearance order scanning train, then valid, then test. Fields are
/// whitespace-trimmed; blank lines are skipped.
/// Throws DatasetNotFound or ParseError (file + line).
KnowledgeGraph load_dataset(const std::filesystem::path& dir, const SplitFiles& files = {});

/// Parses one TSV line into a RawTriple; throws ParseError on != 3 fields or empty fields.
RawTriple parse_triple_line(std::string_view line, const std::string& file, std::size_t line_no);

DatasetStats stats(const KnowledgeGraph& kg);

enum class SyntheticPattern { ring };

SyntheticPattern parse_pattern(std::string_view name);

/// Ring fixture: for k in [0, n) the triple (k, 0, (k+1) mod n). Triples with
/// k % 10 == 9 form the test split, the rest are train; validation is empty.
/// Entities are labelled "e<k>", relations "r<j>" for j < n_relations (only r0
/// carries triples). The ring is fully determined by its sizes; `seed` is
/// accepted for interface uniformity and does not alter the output.
/// Throws ArgumentError when n_entities < 2 or n_relations < 1.
KnowledgeGraph generate_synthetic(std::size_t n_entities, std::size_t n_relations,
                                  SyntheticPattern pattern, std::uint64_t seed);

/// Writes the three split files in the format load_dataset reads.
void write_dataset(const KnowledgeGraph& kg, const std::filesystem::path& dir, const SplitFiles& files = {});

}  // namespace kge
