#include "kge/graph.hpp"

#include <fstream>

#include "kge/errors.hpp"

namespace kge {

namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\v\f";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::vector<RawTriple> read_split(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetNotFound("dataset file not found: " + path.string());

    std::vector<RawTriple> out;
    std::string line;
    std::size_t line_no = 0;
    const std::string file = path.string();
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        out.push_back(parse_triple_line(line, file, line_no));
    }
    return out;
}

}  // namespace

Index Vocabulary::intern(std::string_view label) {
    if (auto it = index_.find(label); it != index_.end()) return it->second;
    const auto idx = static_cast<Index>(labels_.size());
    labels_.emplace_back(label);
    index_.emplace(labels_.back(), idx);
    return idx;
}

Index Vocabulary::index_of(std::string_view label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw ArgumentError("unknown label: " + std::string(label));
    return it->second;
}

bool Vocabulary::contains(std::string_view label) const { return index_.find(label) != index_.end(); }

const std::string& Vocabulary::label(Index index) const {
    if (index >= labels_.size())
        throw ArgumentError("vocabulary index " + std::to_string(index) + " out of range");
    return labels_[index];
}

Triple KnowledgeGraph::encode(const RawTriple& raw) const {
    return {entities.index_of(raw.head), relations.index_of(raw.relation), entities.index_of(raw.tail)};
}

RawTriple KnowledgeGraph::decode(const Triple& t) const {
    return {entities.label(t.head), relations.label(t.relation), entities.label(t.tail)};
}

RawTriple parse_triple_line(std::string_view line, const std::string& file, std::size_t line_no) {
    std::string_view fields[3];
    std::size_t n = 0;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        const auto field = line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start);
        if (n < 3) fields[n] = trim(field);
        ++n;
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    if (n != 3)
        throw ParseError(file, line_no, "expected 3 tab-separated fields, found " + std::to_string(n));
    for (const auto& f : fields)
        if (f.empty()) throw ParseError(file, line_no, "empty field");
    return {std::string(fields[0]), std::string(fields[1]), std::string(fields[2])};
}

KnowledgeGraph load_dataset(const std::filesystem::path& dir, const SplitFiles& files) {
    if (!std::filesystem::is_directory(dir)) throw DatasetNotFound("dataset directory not found: " + dir.string());

    // Read all three before interning so a parse error leaves nothing half-built.
    const auto raw_train = read_split(dir / files.train);
    const auto raw_valid = read_split(dir / files.valid);
    const auto raw_test = read_split(dir / files.test);

    KnowledgeGraph kg;
    auto encode_all = [&kg](const std::vector<RawTriple>& raws, std::vector<Triple>& out) {
        out.reserve(raws.size());
        for (const auto& r : raws) {
            const Index h = kg.entities.intern(r.head);
            const Index rel = kg.relations.intern(r.relation);
            const Index t = kg.entities.intern(r.tail);
            out.push_back({h, rel, t});
        }
    };
    encode_all(raw_train, kg.train);
    encode_all(raw_valid, kg.validation);
    encode_all(raw_test, kg.test);
    return kg;
}

DatasetStats stats(const KnowledgeGraph& kg) {
    return {kg.entities.size(), kg.relations.size(), kg.train.size(), kg.validation.size(), kg.test.size()};
}

SyntheticPattern parse_pattern(std::string_view name) {
    if (name == "ring") return SyntheticPattern::ring;
    throw ArgumentError("unknown synthetic pattern '" + std::string(name) + "' (valid: ring)");
}

KnowledgeGraph generate_synthetic(std::size_t n_entities, std::size_t n_relations, SyntheticPattern pattern,
                                  std::uint64_t /*seed*/) {
    if (n_entities < 2) throw ArgumentError("synthetic graph needs at least 2 entities");
    if (n_relations < 1) throw ArgumentError("synthetic graph needs at least 1 relation");
    if (pattern != SyntheticPattern::ring) throw ArgumentError("unsupported synthetic pattern");

    KnowledgeGraph kg;
    for (std::size_t j = 0; j < n_relations; ++j) kg.relations.intern("r" + std::to_string(j));

    // Interning train triples first and then test keeps first-appearance order
    // identical to what load_dataset would produce from the written files.
    auto add = [&kg](std::size_t k, std::size_t n, std::vector<Triple>& split) {
        const Index h = kg.entities.intern("e" + std::to_string(k));
        const Index t = kg.entities.intern("e" + std::to_string((k + 1) % n));
        split.push_back({h, 0, t});
    };
    kg.train.reserve(n_entities - n_entities / 10);
    for (std::size_t k = 0; k < n_entities; ++k)
        if (k % 10 != 9) add(k, n_entities, kg.train);
    for (std::size_t k = 9; k < n_entities; k += 10) add(k, n_entities, kg.test);
    return kg;
}

void write_dataset(const KnowledgeGraph& kg, const std::filesystem::path& dir, const SplitFiles& files) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    auto write = [&](const std::vector<Triple>& split, const std::string& name) {
        const auto path = dir / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + path.string());
        for (const auto& t : split) {
            const auto raw = kg.decode(t);
            out << raw.head << '\t' << raw.relation << '\t' << raw.tail << '\n';
        }
        if (!out) throw IoError("write failed: " + path.string());
    };
    write(kg.train, files.train);
    write(kg.validation, files.valid);
    write(kg.test, files.test);
}

}  // namespace kge
