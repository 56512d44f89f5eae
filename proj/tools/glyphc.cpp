// glyphc - command line front end for implicit glyph fitting, training,
// rendering, vector export and evaluation.
//
// stdout carries a single JSON summary per command; diagnostics go to
// stderr. Exit codes: 0 success, 1 usage/I-O error, 2 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "glyph/contour.hpp"
#include "glyph/fitting.hpp"
#include "glyph/manifold.hpp"
#include "glyph/raster.hpp"
#include "glyph/synthfont.hpp"
#include "glyph/transfer.hpp"
#include "glyph/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitNumerical = 2;

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key=value config file; '#' comments; unknown keys rejected.
std::map<std::string, std::string> read_config(const std::string& path,
                                               const std::vector<std::string>& known) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::runtime_error(path + ": unknown config key '" + key + "'");
        kv[key] = val;
    }
    return kv;
}

std::uint64_t file_hash(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return 0;
    std::ostringstream buf;
    buf << f.rdbuf();
    const std::string s = buf.str();
    return glyph::fnv1a({reinterpret_cast<const unsigned char*>(s.data()), s.size()});
}

void emit(const json& summary) { std::cout << summary.dump() << std::endl; }

// Common numeric options shared by the training-style commands.
struct CommonOpts {
    int v = 16;
    int p = 6;
    int iterations = 0;  // per-command default if 0
    int batch = 0;
    double lambda_w = 0.1;
    double lr = 1e-4;
    std::uint64_t seed = 0;
    bool deterministic = true;
    std::string config_file;
};

const std::vector<std::string> kKnownKeys = {
    "v", "p", "iterations", "batch", "lambda_w", "lambda_cont", "lambda_style",
    "lambda_latent", "lambda_cate", "lr", "seed", "deterministic", "steps",
    "size", "grid_res", "w_min", "latent_dim", "hidden", "finetune_decoder",
    "holdout_fonts", "infer_steps", "infer_lr"};

void apply_config(const std::map<std::string, std::string>& kv, CommonOpts& o) {
    auto get = [&](const char* k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (auto* s = get("v")) o.v = std::stoi(*s);
    if (auto* s = get("p")) o.p = std::stoi(*s);
    if (auto* s = get("iterations")) o.iterations = std::stoi(*s);
    if (auto* s = get("batch")) o.batch = std::stoi(*s);
    if (auto* s = get("lambda_w")) o.lambda_w = std::stod(*s);
    if (auto* s = get("lr")) o.lr = std::stod(*s);
    if (auto* s = get("seed")) o.seed = std::stoull(*s);
    if (auto* s = get("deterministic")) o.deterministic = (*s == "1" || *s == "true");
}

json config_json(const CommonOpts& o) {
    return {{"v", o.v},         {"p", o.p},           {"iterations", o.iterations},
            {"batch", o.batch}, {"lambda_w", o.lambda_w}, {"lr", o.lr},
            {"seed", o.seed},   {"deterministic", o.deterministic}};
}

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_file, "flat key=value config file (flags win)");
    cmd->add_option("--v", o.v, "number of primitives");
    cmd->add_option("--p", o.p, "curves per primitive");
    cmd->add_option("--iterations", o.iterations, "optimization iterations");
    cmd->add_option("--batch", o.batch, "batch size (0 = full grid / default)");
    cmd->add_option("--lambda-w", o.lambda_w, "weight of the W regularizer");
    cmd->add_option("--lr", o.lr, "Adam learning rate");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_flag("--deterministic,!--no-deterministic", o.deterministic,
                  "fixed-order gradient accumulation");
}

// Flags win over the config file: parse config first, then re-apply any
// flag the user passed on the command line.
void finalize_common(const CLI::App* cmd, CommonOpts& o) {
    if (o.config_file.empty()) return;
    CommonOpts from_file = o;
    // reset flag-provided values to defaults is unnecessary: we apply file
    // values only for options the user did not pass explicitly.
    const auto kv = read_config(o.config_file, kKnownKeys);
    CommonOpts file_opts = o;
    apply_config(kv, file_opts);
    auto passed = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (!passed("--v")) o.v = file_opts.v;
    if (!passed("--p")) o.p = file_opts.p;
    if (!passed("--iterations")) o.iterations = file_opts.iterations;
    if (!passed("--batch")) o.batch = file_opts.batch;
    if (!passed("--lambda-w")) o.lambda_w = file_opts.lambda_w;
    if (!passed("--lr")) o.lr = file_opts.lr;
    if (!passed("--seed")) o.seed = file_opts.seed;
    (void)from_file;
}

glyph::RasterImage load_image_checked(const std::string& path, bool invert) {
    glyph::RasterImage img = glyph::load_pgm(path);
    if (invert)
        for (double& p : img.pixels) p = 1.0 - p;
    return img;
}

int cmd_fit(const std::string& image_path, const std::string& out_path,
            const std::string& trace_path, bool invert, const CommonOpts& opts) {
    const glyph::RasterImage img = load_image_checked(image_path, invert);
    glyph::FitConfig cfg;
    cfg.v = opts.v;
    cfg.p = opts.p;
    cfg.iterations = opts.iterations > 0 ? opts.iterations : 20000;
    cfg.batch_size = opts.batch;
    cfg.lambda_w = opts.lambda_w;
    cfg.lr = opts.lr;
    cfg.seed = opts.seed;

    const glyph::FitResult result = glyph::fit_glyph(img, cfg);
    if (!trace_path.empty()) glyph::write_trace_csv(result.trace, trace_path);
    if (result.diverged)
        throw NumericalFailure("fit diverged (non-finite loss) at iteration " +
                               std::to_string(result.trace.size()));
    glyph::save_shape_checkpoint(result.params, out_path);

    const glyph::RasterImage recon = glyph::render_soft(result.params, img.height, img.width);
    emit({{"command", "fit"},
          {"input", image_path},
          {"input_hash", file_hash(image_path)},
          {"checkpoint", out_path},
          {"final_loss", result.trace.back().total},
          {"ssim", glyph::ssim(recon, img)},
          {"config", config_json(opts)}});
    return kExitOk;
}

glyph::GlyphShapeParams params_for_render(const std::string& ckpt, const std::string& glyph_id) {
    if (glyph::probe_checkpoint(ckpt) == glyph::CheckpointKind::Shape)
        return glyph::load_shape_checkpoint(ckpt);
    glyph::DecoderModel model;
    glyph::LatentTable table;
    if (glyph::probe_checkpoint(ckpt) == glyph::CheckpointKind::Decoder) {
        glyph::load_decoder_checkpoint(ckpt, model, table);
    } else {
        glyph::TransferModel transfer;
        glyph::load_transfer_checkpoint(ckpt, model, table, transfer);
    }
    if (glyph_id.empty())
        throw std::runtime_error("model checkpoint requires --glyph <font>/<letter>");
    const auto slash = glyph_id.find('/');
    if (slash == std::string::npos || slash + 2 != glyph_id.size())
        throw std::runtime_error("glyph id must be <font>/<letter>");
    const int character = glyph_id.back() - 'A';
    const glyph::LatentEntry* e = table.find(glyph_id.substr(0, slash), character);
    if (!e) throw std::runtime_error("glyph id not in latent table: " + glyph_id);
    return glyph::decode(e->z, model);
}

int cmd_render(const std::string& ckpt, const std::string& out_path, int size,
               const std::string& mode, double w_min, const std::string& glyph_id) {
    const glyph::GlyphShapeParams params = params_for_render(ckpt, glyph_id);
    glyph::RasterImage img;
    if (mode == "soft") img = glyph::render_soft(params, size, size);
    else if (mode == "hard") img = glyph::render_hard(params, size, size, w_min);
    else throw std::runtime_error("render mode must be soft or hard");
    glyph::save_pgm(img, out_path);
    emit({{"command", "render"},
          {"checkpoint", ckpt},
          {"checkpoint_hash", file_hash(ckpt)},
          {"output", out_path},
          {"size", size},
          {"mode", mode}});
    return kExitOk;
}

int cmd_interp(const std::string& ckpt, const std::string& id_a, const std::string& id_b,
               int steps, int size, const std::string& out_dir) {
    glyph::DecoderModel model;
    glyph::LatentTable table;
    glyph::load_decoder_checkpoint(ckpt, model, table);
    auto lookup = [&](const std::string& id) -> const glyph::LatentEntry& {
        const auto slash = id.find('/');
        if (slash == std::string::npos || slash + 2 != id.size())
            throw std::runtime_error("glyph id must be <font>/<letter>: " + id);
        const glyph::LatentEntry* e = table.find(id.substr(0, slash), id.back() - 'A');
        if (!e) throw std::runtime_error("glyph id not in latent table: " + id);
        return *e;
    };
    const glyph::LatentEntry& a = lookup(id_a);
    const glyph::LatentEntry& b = lookup(id_b);
    if (steps < 1) throw std::runtime_error("--steps must be >= 1");
    fs::create_directories(out_dir);
    json files = json::array();
    for (int k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) / steps;
        const glyph::LatentCode z = glyph::interpolate(a.z, b.z, t);
        const glyph::RasterImage img = glyph::render_soft(glyph::decode(z, model), size, size);
        std::ostringstream name;
        name << "interp_" << std::setw(3) << std::setfill('0') << k << ".pgm";
        const std::string path = (fs::path(out_dir) / name.str()).string();
        glyph::save_pgm(img, path);
        files.push_back(path);
    }
    emit({{"command", "interp"},
          {"checkpoint", ckpt},
          {"a", id_a},
          {"b", id_b},
          {"steps", steps},
          {"outputs", files}});
    return kExitOk;
}

int cmd_train(const std::string& dataset, const std::string& out_path, bool invert,
              const CommonOpts& opts, int latent_dim, int hidden,
              const std::string& trace_path) {
    const glyph::FontDataset data = glyph::load_dataset(dataset, invert);
    if (data.train.empty()) throw std::runtime_error("dataset has no training fonts: " + dataset);
    glyph::ManifoldConfig cfg;
    cfg.v = opts.v;
    cfg.p = opts.p;
    cfg.latent_dim = latent_dim;
    cfg.hidden = hidden;
    cfg.iterations = opts.iterations > 0 ? opts.iterations : 60000;
    cfg.batch_glyphs = opts.batch > 0 ? opts.batch : 32;
    cfg.lr = opts.lr;
    cfg.lambda_w = opts.lambda_w;
    cfg.seed = opts.seed;

    const glyph::ManifoldResult result = glyph::train_autodecoder(data, cfg);
    if (!trace_path.empty()) glyph::write_trace_csv(result.trace, trace_path);
    if (result.diverged) throw NumericalFailure("training diverged (non-finite loss)");
    glyph::save_decoder_checkpoint(result.model, result.table, out_path);
    emit({{"command", "train"},
          {"dataset", dataset},
          {"checkpoint", out_path},
          {"train_fonts", data.train.size()},
          {"validation_fonts", data.validation.size()},
          {"final_loss", result.trace.back().total},
          {"config", config_json(opts)}});
    return kExitOk;
}

int cmd_transfer(const std::string& dataset, const std::string& model_path,
                 const std::string& out_path, bool invert, const CommonOpts& opts,
                 double l_cont, double l_style, double l_latent, double l_cate,
                 bool finetune, const std::vector<std::string>& holdout,
                 const std::string& trace_path) {
    const glyph::FontDataset data = glyph::load_dataset(dataset, invert);
    glyph::DecoderModel decoder;
    glyph::LatentTable table;
    glyph::load_decoder_checkpoint(model_path, decoder, table);

    glyph::TransferConfig cfg;
    cfg.iterations = opts.iterations > 0 ? opts.iterations : 6000;
    cfg.batch_triplets = opts.batch > 0 ? opts.batch : 16;
    cfg.lr = opts.lr;
    cfg.lambda_w = opts.lambda_w;
    cfg.lambda_cont = l_cont;
    cfg.lambda_style = l_style;
    cfg.lambda_latent = l_latent;
    cfg.lambda_cate = l_cate;
    cfg.finetune_decoder = finetune;
    cfg.seed = opts.seed;
    cfg.holdout_fonts = holdout;

    const glyph::TransferResult result = glyph::train_transfer(data, table, decoder, cfg);
    if (!trace_path.empty()) glyph::write_trace_csv(result.trace, trace_path);
    if (result.diverged) throw NumericalFailure("transfer training diverged");
    glyph::save_transfer_checkpoint(result.decoder, table, result.model, out_path);
    emit({{"command", "transfer"},
          {"dataset", dataset},
          {"decoder", model_path},
          {"checkpoint", out_path},
          {"final_objective", result.trace.back().total},
          {"config", config_json(opts)}});
    return kExitOk;
}

int cmd_infer(const std::string& image_path, const std::string& model_path,
              const std::string& out_path, bool invert, int steps, double lr) {
    const glyph::RasterImage img = load_image_checked(image_path, invert);
    glyph::DecoderModel model;
    glyph::LatentTable table;
    if (glyph::probe_checkpoint(model_path) == glyph::CheckpointKind::Transfer) {
        glyph::TransferModel transfer;
        glyph::load_transfer_checkpoint(model_path, model, table, transfer);
    } else {
        glyph::load_decoder_checkpoint(model_path, model, table);
    }
    glyph::InferConfig cfg;
    cfg.steps = steps;
    cfg.lr = lr;
    const glyph::LatentCode z = glyph::infer_latent(img, model, cfg);
    const glyph::GlyphShapeParams params = glyph::decode(z, model);
    glyph::save_shape_checkpoint(params, out_path);
    const glyph::RasterImage recon = glyph::render_soft(params, img.height, img.width);
    emit({{"command", "infer"},
          {"input", image_path},
          {"input_hash", file_hash(image_path)},
          {"checkpoint", out_path},
          {"ssim", glyph::ssim(recon, img)}});
    return kExitOk;
}

int cmd_oneshot(const std::string& style_path, const std::string& content_path,
                const std::string& model_path, const std::string& out_path, bool invert,
                int size, int steps, double lr) {
    glyph::DecoderModel decoder;
    glyph::LatentTable table;
    glyph::TransferModel transfer;
    glyph::load_transfer_checkpoint(model_path, decoder, table, transfer);
    glyph::InferConfig icfg;
    icfg.steps = steps;
    icfg.lr = lr;
    const glyph::RasterImage style = load_image_checked(style_path, invert);
    const glyph::RasterImage content = load_image_checked(content_path, invert);
    const glyph::RasterImage out = glyph::transfer_one_shot(style, content, decoder, transfer,
                                                            icfg, size);
    glyph::save_pgm(out, out_path);
    emit({{"command", "oneshot"},
          {"style", style_path},
          {"content", content_path},
          {"output", out_path}});
    return kExitOk;
}

int cmd_export_svg(const std::string& ckpt, const std::string& out_path, int grid_res,
                   double w_min, double view_size, const std::string& glyph_id) {
    const glyph::GlyphShapeParams params = params_for_render(ckpt, glyph_id);
    const glyph::ContourSet contours = glyph::extract_contours(params, grid_res, w_min);
    const std::string svg = glyph::export_svg(contours, view_size);
    std::ofstream f(out_path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file: " + out_path);
    f << svg;
    emit({{"command", "export-svg"},
          {"checkpoint", ckpt},
          {"output", out_path},
          {"contours", contours.contours.size()},
          {"grid_res", grid_res}});
    return kExitOk;
}

int cmd_eval(const std::string& a_path, const std::string& b_path) {
    std::vector<std::pair<std::string, std::string>> pairs;
    if (fs::is_directory(a_path) && fs::is_directory(b_path)) {
        std::vector<std::string> names;
        for (const auto& e : fs::directory_iterator(a_path))
            if (e.path().extension() == ".pgm") names.push_back(e.path().filename().string());
        std::sort(names.begin(), names.end());
        for (const std::string& n : names) {
            const fs::path other = fs::path(b_path) / n;
            if (fs::exists(other)) pairs.emplace_back((fs::path(a_path) / n).string(), other.string());
        }
        if (pairs.empty()) throw std::runtime_error("no matching .pgm pairs between directories");
    } else {
        pairs.emplace_back(a_path, b_path);
    }
    double ssim_sum = 0.0, l1_sum = 0.0;
    for (const auto& [pa, pb] : pairs) {
        const glyph::MetricReport r =
            glyph::compare_images(glyph::load_pgm(pa), glyph::load_pgm(pb));
        ssim_sum += r.ssim;
        l1_sum += r.l1;
    }
    emit({{"command", "eval"},
          {"pairs", pairs.size()},
          {"ssim", ssim_sum / pairs.size()},
          {"l1", l1_sum / pairs.size()}});
    return kExitOk;
}

int cmd_make_dataset(const std::string& root, int fonts, int size, int validation) {
    const std::string index = glyph::write_dataset(root, fonts, size, validation);
    emit({{"command", "make-dataset"},
          {"root", root},
          {"fonts", fonts},
          {"size", size},
          {"index", index}});
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"implicit glyph shape toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;

    // fit
    std::string image_path, out_path, trace_path, glyph_id;
    bool invert = false;
    auto* fit = app.add_subcommand("fit", "fit shape parameters to a glyph image");
    fit->add_option("image", image_path, "input PGM (P5) glyph image")->required();
    fit->add_option("--out", out_path, "output checkpoint")->required();
    fit->add_option("--trace", trace_path, "loss trace CSV");
    fit->add_flag("--invert", invert, "invert white-on-black input");
    add_common(fit, opts);

    // render
    std::string ckpt_path, mode = "soft";
    int size = 64, grid_res = 512, steps = 10;
    double w_min = 0.5, view_size = 256.0;
    auto* render = app.add_subcommand("render", "render a checkpoint to an image");
    render->add_option("checkpoint", ckpt_path)->required();
    render->add_option("--out", out_path)->required();
    render->add_option("--size", size, "output resolution");
    render->add_option("--mode", mode, "soft|hard");
    render->add_option("--w-min", w_min, "primitive weight threshold (hard mode)");
    render->add_option("--glyph", glyph_id, "<font>/<letter> for model checkpoints");

    // interp
    std::string id_a, id_b, out_dir;
    auto* interp = app.add_subcommand("interp", "interpolate between two latent codes");
    interp->add_option("checkpoint", ckpt_path)->required();
    interp->add_option("a", id_a, "<font>/<letter>")->required();
    interp->add_option("b", id_b, "<font>/<letter>")->required();
    interp->add_option("--steps", steps, "number of interpolation intervals");
    interp->add_option("--size", size, "render resolution");
    interp->add_option("--out", out_dir, "output directory")->required();

    // train
    std::string dataset;
    int latent_dim = 256, hidden = 256;
    auto* train = app.add_subcommand("train", "train the auto-decoder manifold");
    train->add_option("dataset", dataset, "dataset root with index.txt")->required();
    train->add_option("--out", out_path)->required();
    train->add_option("--trace", trace_path, "loss trace CSV");
    train->add_option("--latent-dim", latent_dim);
    train->add_option("--hidden", hidden);
    train->add_flag("--invert", invert, "invert white-on-black dataset");
    add_common(train, opts);

    // transfer
    std::string model_path;
    double l_cont = 0.1, l_style = 0.1, l_latent = 0.1, l_cate = 0.05;
    bool finetune = true;
    std::vector<std::string> holdout;
    auto* transfer = app.add_subcommand("transfer", "train the one-shot style transfer head");
    transfer->add_option("dataset", dataset)->required();
    transfer->add_option("--model", model_path, "trained decoder checkpoint")->required();
    transfer->add_option("--out", out_path)->required();
    transfer->add_option("--trace", trace_path, "loss trace CSV");
    transfer->add_option("--lambda-cont", l_cont);
    transfer->add_option("--lambda-style", l_style);
    transfer->add_option("--lambda-latent", l_latent);
    transfer->add_option("--lambda-cate", l_cate);
    transfer->add_flag("--finetune-decoder,!--freeze-decoder", finetune);
    transfer->add_option("--holdout", holdout, "fonts excluded from triplet sampling");
    transfer->add_flag("--invert", invert);
    add_common(transfer, opts);

    // infer
    int infer_steps = 600;
    double infer_lr = 1e-2;
    auto* infer = app.add_subcommand("infer", "optimize a latent for an unseen image");
    infer->add_option("image", image_path)->required();
    infer->add_option("--model", model_path)->required();
    infer->add_option("--out", out_path, "output shape checkpoint")->required();
    infer->add_option("--steps", infer_steps);
    infer->add_option("--lr", infer_lr);
    infer->add_flag("--invert", invert);

    // oneshot
    std::string style_path, content_path;
    auto* oneshot = app.add_subcommand("oneshot", "one-shot style transfer between two images");
    oneshot->add_option("--style", style_path)->required();
    oneshot->add_option("--content", content_path)->required();
    oneshot->add_option("--model", model_path, "transfer checkpoint")->required();
    oneshot->add_option("--out", out_path)->required();
    oneshot->add_option("--size", size);
    oneshot->add_option("--steps", infer_steps);
    oneshot->add_option("--lr", infer_lr);
    oneshot->add_flag("--invert", invert);

    // export-svg
    auto* svg = app.add_subcommand("export-svg", "extract contours and write SVG");
    svg->add_option("checkpoint", ckpt_path)->required();
    svg->add_option("--out", out_path)->required();
    svg->add_option("--grid-res", grid_res);
    svg->add_option("--w-min", w_min);
    svg->add_option("--view-size", view_size);
    svg->add_option("--glyph", glyph_id, "<font>/<letter> for model checkpoints");

    // eval
    std::string eval_a, eval_b;
    auto* eval = app.add_subcommand("eval", "SSIM/L1 between images or directories");
    eval->add_option("a", eval_a)->required();
    eval->add_option("b", eval_b)->required();

    // make-dataset
    std::string ds_root;
    int ds_fonts = 20, ds_size = 64, ds_validation = 0;
    auto* mkds = app.add_subcommand("make-dataset", "generate a procedural glyph dataset");
    mkds->add_option("root", ds_root)->required();
    mkds->add_option("--fonts", ds_fonts);
    mkds->add_option("--size", ds_size);
    mkds->add_option("--validation", ds_validation);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) {
            finalize_common(fit, opts);
            return cmd_fit(image_path, out_path, trace_path, invert, opts);
        }
        if (render->parsed())
            return cmd_render(ckpt_path, out_path, size, mode, w_min, glyph_id);
        if (interp->parsed())
            return cmd_interp(ckpt_path, id_a, id_b, steps, size, out_dir);
        if (train->parsed()) {
            finalize_common(train, opts);
            return cmd_train(dataset, out_path, invert, opts, latent_dim, hidden, trace_path);
        }
        if (transfer->parsed()) {
            finalize_common(transfer, opts);
            return cmd_transfer(dataset, model_path, out_path, invert, opts, l_cont, l_style,
                                l_latent, l_cate, finetune, holdout, trace_path);
        }
        if (infer->parsed())
            return cmd_infer(image_path, model_path, out_path, invert, infer_steps, infer_lr);
        if (oneshot->parsed())
            return cmd_oneshot(style_path, content_path, model_path, out_path, invert, size,
                               infer_steps, infer_lr);
        if (svg->parsed())
            return cmd_export_svg(ckpt_path, out_path, grid_res, w_min, view_size, glyph_id);
        if (eval->parsed()) return cmd_eval(eval_a, eval_b);
        if (mkds->parsed()) return cmd_make_dataset(ds_root, ds_fonts, ds_size, ds_validation);
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << std::endl;
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitIo;
    }
    return kExitIo;
}
