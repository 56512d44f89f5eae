#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "glyph/manifold.hpp"
#include "glyph/transfer.hpp"

// Binary checkpoint I/O. Field order is documented in docs/checkpoint.md
// and must not change without bumping the magic version.

namespace glyph {

namespace {

constexpr char kMagic[8] = {'G', 'L', 'Y', 'P', 'H', 'C', 'K', '1'};

struct Writer {
    std::ofstream f;
    explicit Writer(const std::string& path) : f(path, std::ios::binary | std::ios::trunc) {
        if (!f) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    }
    void bytes(const void* p, std::size_t n) { f.write(static_cast<const char*>(p), n); }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void f64(double v) { bytes(&v, 8); }
    void f64s(const std::vector<double>& v) { bytes(v.data(), v.size() * 8); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
};

struct Reader {
    std::ifstream f;
    std::string path;
    explicit Reader(const std::string& p) : f(p, std::ios::binary), path(p) {
        if (!f) throw std::runtime_error("cannot open checkpoint: " + p);
    }
    void bytes(void* p, std::size_t n) {
        f.read(static_cast<char*>(p), n);
        if (f.gcount() != static_cast<std::streamsize>(n))
            throw std::runtime_error("truncated checkpoint: " + path);
    }
    std::uint32_t u32() {
        std::uint32_t v;
        bytes(&v, 4);
        return v;
    }
    double f64() {
        double v;
        bytes(&v, 8);
        return v;
    }
    std::vector<double> f64s(std::size_t n) {
        std::vector<double> v(n);
        bytes(v.data(), n * 8);
        return v;
    }
    std::string str() {
        const std::uint32_t n = u32();
        if (n > (1u << 20)) throw std::runtime_error("corrupt checkpoint string: " + path);
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
};

void write_header(Writer& w, CheckpointKind kind) {
    w.bytes(kMagic, 8);
    w.u32(static_cast<std::uint32_t>(kind));
}

CheckpointKind read_header(Reader& r) {
    char magic[8];
    r.bytes(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("not a glyph checkpoint: " + r.path);
    const std::uint32_t kind = r.u32();
    if (kind < 1 || kind > 3)
        throw std::runtime_error("unknown checkpoint kind in " + r.path);
    return static_cast<CheckpointKind>(kind);
}

void write_mlp(Writer& w, const MlpWeights& m) {
    w.u32(static_cast<std::uint32_t>(m.dims.size()));
    for (int d : m.dims) w.u32(static_cast<std::uint32_t>(d));
    w.f64s(m.data);
}

MlpWeights read_mlp(Reader& r) {
    MlpWeights m;
    const std::uint32_t nd = r.u32();
    if (nd < 2 || nd > 64) throw std::runtime_error("corrupt MLP dims in " + r.path);
    m.dims.resize(nd);
    for (auto& d : m.dims) d = static_cast<int>(r.u32());
    m.data = r.f64s(m.param_count());
    return m;
}

void write_decoder_body(Writer& w, const DecoderModel& model, const LatentTable& table) {
    w.u32(static_cast<std::uint32_t>(model.v));
    w.u32(static_cast<std::uint32_t>(model.p));
    w.u32(static_cast<std::uint32_t>(model.latent_dim));
    write_mlp(w, model.mparam);
    w.f64s(model.sigma);
    w.f64s(model.W);
    w.u32(static_cast<std::uint32_t>(table.size()));
    for (const LatentEntry& e : table.entries) {
        w.str(e.font);
        w.u32(static_cast<std::uint32_t>(e.character));
        w.f64s(e.z);
    }
}

void read_decoder_body(Reader& r, DecoderModel& model, LatentTable& table) {
    model.v = static_cast<int>(r.u32());
    model.p = static_cast<int>(r.u32());
    model.latent_dim = static_cast<int>(r.u32());
    if (model.v < 1 || model.p < 1 || model.latent_dim < 1)
        throw std::runtime_error("corrupt decoder header in " + r.path);
    model.mparam = read_mlp(r);
    model.sigma = r.f64s(static_cast<std::size_t>(model.v) * model.p);
    model.W = r.f64s(static_cast<std::size_t>(model.v));
    const std::uint32_t n = r.u32();
    table.entries.clear();
    table.entries.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        LatentEntry e;
        e.font = r.str();
        e.character = static_cast<int>(r.u32());
        e.z = r.f64s(static_cast<std::size_t>(model.latent_dim));
        table.entries.push_back(std::move(e));
    }
}

// Atomic write: temp file in the same directory, then rename.
class AtomicFile {
  public:
    explicit AtomicFile(const std::string& path)
        : final_(path), tmp_(path + ".tmp") {}
    const std::string& tmp() const { return tmp_; }
    void commit() { std::filesystem::rename(tmp_, final_); }

  private:
    std::string final_;
    std::string tmp_;
};

}  // namespace

void save_shape_checkpoint(const GlyphShapeParams& params, const std::string& path) {
    AtomicFile out(path);
    {
        Writer w(out.tmp());
        write_header(w, CheckpointKind::Shape);
        w.u32(static_cast<std::uint32_t>(params.v));
        w.u32(static_cast<std::uint32_t>(params.p));
        w.f64s(params.P);
        w.f64s(params.sigma);
        w.f64s(params.W);
    }
    out.commit();
}

GlyphShapeParams load_shape_checkpoint(const std::string& path) {
    Reader r(path);
    if (read_header(r) != CheckpointKind::Shape)
        throw std::runtime_error("checkpoint is not a shape checkpoint: " + path);
    const int v = static_cast<int>(r.u32());
    const int p = static_cast<int>(r.u32());
    if (v < 1 || p < 1 || v > 4096 || p > 4096)
        throw std::runtime_error("corrupt shape checkpoint: " + path);
    GlyphShapeParams params = GlyphShapeParams::zeros(v, p);
    params.P = r.f64s(params.P.size());
    params.sigma = r.f64s(params.sigma.size());
    params.W = r.f64s(params.W.size());
    return params;
}

void save_decoder_checkpoint(const DecoderModel& model, const LatentTable& table,
                             const std::string& path) {
    AtomicFile out(path);
    {
        Writer w(out.tmp());
        write_header(w, CheckpointKind::Decoder);
        write_decoder_body(w, model, table);
    }
    out.commit();
}

void load_decoder_checkpoint(const std::string& path, DecoderModel& model, LatentTable& table) {
    Reader r(path);
    if (read_header(r) != CheckpointKind::Decoder)
        throw std::runtime_error("checkpoint is not a decoder checkpoint: " + path);
    read_decoder_body(r, model, table);
}

void save_transfer_checkpoint(const DecoderModel& decoder, const LatentTable& table,
                              const TransferModel& transfer, const std::string& path) {
    AtomicFile out(path);
    {
        Writer w(out.tmp());
        write_header(w, CheckpointKind::Transfer);
        write_decoder_body(w, decoder, table);
        w.u32(static_cast<std::uint32_t>(transfer.latent_dim));
        w.u32(static_cast<std::uint32_t>(transfer.style_dim));
        write_mlp(w, transfer.sep);
        write_mlp(w, transfer.merge);
        write_mlp(w, transfer.classifier);
        w.f64(transfer.lambda_cont);
        w.f64(transfer.lambda_style);
        w.f64(transfer.lambda_latent);
        w.f64(transfer.lambda_cate);
    }
    out.commit();
}

void load_transfer_checkpoint(const std::string& path, DecoderModel& decoder,
                              LatentTable& table, TransferModel& transfer) {
    Reader r(path);
    if (read_header(r) != CheckpointKind::Transfer)
        throw std::runtime_error("checkpoint is not a transfer checkpoint: " + path);
    read_decoder_body(r, decoder, table);
    transfer.latent_dim = static_cast<int>(r.u32());
    transfer.style_dim = static_cast<int>(r.u32());
    transfer.sep = read_mlp(r);
    transfer.merge = read_mlp(r);
    transfer.classifier = read_mlp(r);
    transfer.lambda_cont = r.f64();
    transfer.lambda_style = r.f64();
    transfer.lambda_latent = r.f64();
    transfer.lambda_cate = r.f64();
}

CheckpointKind probe_checkpoint(const std::string& path) {
    Reader r(path);
    return read_header(r);
}

}  // namespace glyph
