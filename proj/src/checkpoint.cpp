#include "kge/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <span>

#include "kge/errors.hpp"

namespace kge {

namespace {

template <class U>
U to_little(U v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(U)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<U>(bytes);
    } else {
        return v;
    }
}

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
        if (!out_) throw IoError("cannot open checkpoint for writing: " + path.string());
    }

    template <class U>
    void put(U v) {
        v = to_little(v);
        out_.write(reinterpret_cast<const char*>(&v), sizeof v);
    }

    void floats(std::span<const float> xs) {
        if constexpr (std::endian::native == std::endian::little) {
            out_.write(reinterpret_cast<const char*>(xs.data()), static_cast<std::streamsize>(xs.size_bytes()));
        } else {
            for (float x : xs) put(x);
        }
    }

    void raw(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }

    void finish() {
        out_.flush();
        if (!out_) throw IoError("checkpoint write failed: " + path_.string());
    }

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path.string()) {
        if (!in_) throw IoError("cannot open checkpoint: " + path.string());
    }

    template <class U>
    U get() {
        U v{};
        in_.read(reinterpret_cast<char*>(&v), sizeof v);
        if (!in_) throw ParseError(path_, 0, "truncated checkpoint");
        return to_little(v);
    }

    void floats(std::span<float> xs) {
        in_.read(reinterpret_cast<char*>(xs.data()), static_cast<std::streamsize>(xs.size_bytes()));
        if (!in_) throw ParseError(path_, 0, "truncated checkpoint tables");
        if constexpr (std::endian::native == std::endian::big)
            for (auto& x : xs) x = to_little(x);
    }

    void raw(char* p, std::size_t n) {
        in_.read(p, static_cast<std::streamsize>(n));
        if (!in_) throw ParseError(path_, 0, "truncated checkpoint header");
    }

    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

    const std::string& path() const { return path_; }

private:
    std::ifstream in_;
    std::string path_;
};

std::uint32_t kind_code(ModelKind k) {
    switch (k) {
        case ModelKind::transe: return 0;
        case ModelKind::distmult: return 1;
        case ModelKind::convkb: return 2;
    }
    return 0xFFFFFFFFu;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Params& p) {
    Writer w(path);
    w.raw(kCheckpointMagic, 4);
    w.put<std::uint32_t>(kCheckpointVersion);
    w.put<std::uint32_t>(kind_code(p.kind));
    w.put<std::uint32_t>(p.norm == Norm::l1 ? 0 : 1);
    w.put<std::uint64_t>(p.n_entities());
    w.put<std::uint64_t>(p.n_relations());
    w.put<std::uint64_t>(p.dim());
    w.put<std::uint64_t>(p.kind == ModelKind::convkb ? p.tau() : 0);
    w.floats(p.entities.data());
    w.floats(p.relations.data());
    if (p.kind == ModelKind::convkb) {
        w.floats(p.filters);
        w.floats(p.w);
    }
    w.finish();
}

Params load_checkpoint(const std::filesystem::path& path) {
    Reader r(path);
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kCheckpointMagic, 4) != 0) throw ParseError(r.path(), 0, "bad checkpoint magic");
    const auto version = r.get<std::uint32_t>();
    if (version != kCheckpointVersion)
        throw ParseError(r.path(), 0, "unsupported checkpoint version " + std::to_string(version));
    const auto kind = r.get<std::uint32_t>();
    const auto norm = r.get<std::uint32_t>();
    const auto n_e = r.get<std::uint64_t>();
    const auto n_r = r.get<std::uint64_t>();
    const auto dim = r.get<std::uint64_t>();
    const auto tau = r.get<std::uint64_t>();
    if (kind > 2 || norm > 1) throw ParseError(r.path(), 0, "bad model kind or norm code");
    if (n_e == 0 || n_r == 0 || dim == 0) throw ParseError(r.path(), 0, "empty tables in checkpoint");

    Params p;
    p.kind = static_cast<ModelKind>(kind);
    p.norm = norm == 0 ? Norm::l1 : Norm::l2;
    if (p.kind == ModelKind::convkb && tau == 0) throw ParseError(r.path(), 0, "ConvKB checkpoint with tau = 0");
    p.entities = EmbeddingTable<float>(n_e, dim);
    p.relations = EmbeddingTable<float>(n_r, dim);
    r.floats(p.entities.data());
    r.floats(p.relations.data());
    if (p.kind == ModelKind::convkb) {
        p.filters.resize(3 * tau);
        p.w.resize(tau * dim);
        r.floats(p.filters);
        r.floats(p.w);
    }
    if (!r.at_end()) throw ParseError(r.path(), 0, "trailing bytes after checkpoint tables");
    return p;
}

}  // namespace kge
