// toonwarp: fit, apply, train and inspect coarse warp fields.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "toonwarp/dataset.hpp"
#include "toonwarp/error.hpp"
#include "toonwarp/field_io.hpp"
#include "toonwarp/fit.hpp"
#include "toonwarp/png_io.hpp"
#include "toonwarp/train.hpp"
#include "toonwarp/visualize.hpp"
#include "toonwarp/warp.hpp"

namespace fs = std::filesystem;
using namespace toonwarp;

namespace {

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::Io, "no such file: " + path.string());
}

void require_dir(const fs::path& path) {
  if (!fs::is_directory(path)) throw Error(ErrorCode::Io, "no such directory: " + path.string());
}

std::string format_alpha(double alpha) {
  std::ostringstream s;
  s << alpha;
  return s.str();
}

Image load_sized(const fs::path& path, std::size_t size) {
  Image image = read_png(path);
  return size > 0 ? resize_bilinear(image, size, size) : image;
}

Image apply_field(const Image& image, const CoarseField& field, double alpha) {
  return warp(image, upsample(scale_field(field, alpha), image.height(), image.width()));
}

struct FitArgs {
  std::string input, toon, out, history;
  int iters = 500;
  double lr = 0.1;
  double smooth = 0.0;
  std::size_t size = 0;
};

int cmd_fit(const FitArgs& a) {
  require_file(a.input);
  require_file(a.toon);
  const Image x_in = load_sized(a.input, a.size);
  const Image x_toon = resize_bilinear(read_png(a.toon), x_in.height(), x_in.width());
  FitConfig cfg;
  cfg.iterations = a.iters;
  cfg.lr = a.lr;
  cfg.smooth_weight = a.smooth;
  const FitResult result = fit_field(x_in, x_toon, cfg);
  save_field(result.field, a.out);
  const fs::path history = a.history.empty() ? fs::path(a.out).replace_extension(".csv") : fs::path(a.history);
  write_residual_csv(history, result.residuals);
  std::cout << "fit: residual " << result.residuals.front() << " -> " << result.best_residual << " in "
            << result.residuals.size() - 1 << " iterations; wrote " << a.out << " and " << history.string() << "\n";
  return 0;
}

struct FitDatasetArgs {
  std::string root;
  int iters = 500;
  double lr = 0.1;
  double smooth = 0.0;
  std::size_t size = kDefaultDenseSize;
};

int cmd_fit_dataset(const FitDatasetArgs& a) {
  require_dir(a.root);
  const auto samples = load_dataset(a.root, a.size);
  if (samples.empty()) throw Error(ErrorCode::Dataset, "no samples under " + a.root);
  std::vector<std::pair<Image, Image>> pairs;
  for (const auto& s : samples) pairs.emplace_back(s.x_in, s.x_toon);
  FitConfig cfg;
  cfg.iterations = a.iters;
  cfg.lr = a.lr;
  cfg.smooth_weight = a.smooth;
  const auto results = fit_dataset(pairs, cfg);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const fs::path dir = fs::path(a.root) / samples[i].id;
    save_field(results[i].field, dir / "field.atf");
    write_residual_csv(dir / "residuals.csv", results[i].residuals);
    std::cout << samples[i].id << ": residual " << results[i].residuals.front() << " -> "
              << results[i].best_residual << "\n";
  }
  return 0;
}

struct WarpArgs {
  std::string input, field, out;
  std::vector<double> alphas{1.0};
  std::size_t size = 0;
};

int cmd_warp(const WarpArgs& a) {
  require_file(a.input);
  require_file(a.field);
  const Image image = load_sized(a.input, a.size);
  const CoarseField field = load_field(a.field);
  if (a.alphas.size() == 1) {
    write_png(a.out, apply_field(image, field, a.alphas.front()));
    return 0;
  }
  const fs::path out(a.out);
  for (double alpha : a.alphas) {
    fs::path path = out.parent_path() / (out.stem().string() + "_alpha" + format_alpha(alpha) + out.extension().string());
    write_png(path, apply_field(image, field, alpha));
    std::cout << "wrote " << path.string() << "\n";
  }
  return 0;
}

struct TrainArgs {
  std::string root, checkpoint, history;
  int epochs = 200;
  std::size_t batch = 16;
  double lr = 1e-3;
  double lr_decay = 0.95;
  std::uint64_t seed = 0;
  std::size_t size = kDefaultDenseSize;
  double lambda1 = 1.0, lambda2 = 0.7, lambda3 = 1e-6;
  bool no_flip = false, no_jitter = false, no_coords = false;
};

int cmd_train(const TrainArgs& a) {
  require_dir(a.root);
  const auto samples = load_dataset(a.root, a.size);
  TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.lr = a.lr;
  cfg.lr_decay = a.lr_decay;
  cfg.seed = a.seed;
  cfg.weights = {a.lambda1, a.lambda2, a.lambda3};
  cfg.augment = {!a.no_flip, !a.no_jitter};
  PerceiverOptions options;
  options.coord_channels = !a.no_coords;
  const TrainResult result = train(make_reference_perceiver(a.seed, options), samples, cfg);
  save_checkpoint(result.model, a.checkpoint);
  const fs::path history =
      a.history.empty() ? fs::path(a.checkpoint).replace_extension(".csv") : fs::path(a.history);
  write_loss_csv(history, result.history);
  std::cout << "train: total loss " << result.history.front().loss.total << " -> "
            << result.history.back().loss.total << "; wrote " << a.checkpoint << " and " << history.string() << "\n";
  return 0;
}

struct EvalArgs {
  std::string root, out_dir, checkpoint;
  bool untrained = false;
  std::uint64_t seed = 0;
  std::size_t size = kDefaultDenseSize;
  double alpha = 1.0;
  double lambda1 = 1.0, lambda2 = 0.7, lambda3 = 1e-6;
};

int cmd_eval(const EvalArgs& a) {
  require_dir(a.root);
  if (a.untrained == !a.checkpoint.empty()) {
    throw Error(ErrorCode::InvalidArgument, "eval needs exactly one of --checkpoint or --untrained");
  }
  if (!a.checkpoint.empty()) require_file(a.checkpoint);
  const TinyPerceiver model = a.untrained ? make_reference_perceiver(a.seed) : load_checkpoint(a.checkpoint);
  const auto samples = load_dataset(a.root, a.size);
  fs::create_directories(a.out_dir);
  const LossWeights weights{a.lambda1, a.lambda2, a.lambda3};
  weights.validate();

  std::ofstream csv(fs::path(a.out_dir) / "losses.csv");
  if (!csv) throw Error(ErrorCode::Io, "cannot write " + (fs::path(a.out_dir) / "losses.csv").string());
  csv << "id,recon,warp,reg,total\n" << std::setprecision(17);
  for (const auto& s : samples) {
    if (!s.field) throw Error(ErrorCode::InvalidDataset, "sample '" + s.id + "' has no ground-truth field");
    const Inference inf = infer(model, s.x_in, a.alpha);
    const LossReport r = total_loss(inf.cartoon, s.x_toon, inf.field, *s.field, inf.dense, weights);
    csv << s.id << ',' << r.recon << ',' << r.warp << ',' << r.reg << ',' << r.total << '\n';
    const Image panel[] = {s.x_in, inf.cartoon, s.x_toon};
    write_png(fs::path(a.out_dir) / (s.id + "_panel.png"), hconcat(panel));
  }
  std::cout << "eval: " << samples.size() << " samples written to " << a.out_dir << "\n";
  return 0;
}

struct SynthArgs {
  std::string root;
  std::size_t n = 4;
  std::string style = "smooth-random";
  std::uint64_t seed = 0;
  std::size_t size = kDefaultDenseSize;
  double magnitude = 4.0;
  double skin_texture = 1.0;
};

int cmd_synth(const SynthArgs& a) {
  SynthConfig cfg;
  cfg.size = a.size;
  cfg.magnitude = a.magnitude;
  cfg.skin_texture = a.skin_texture;
  const auto samples = synth_dataset(a.seed, a.n, parse_field_style(a.style), cfg);
  fs::create_directories(a.root);
  DatasetManifest manifest{a.root, {}, "train", a.size};
  for (const auto& s : samples) {
    write_sample(a.root, s);
    manifest.ids.push_back(s.id);
  }
  write_manifest(fs::path(a.root) / "manifest.txt", {manifest});
  std::cout << "synth: wrote " << samples.size() << " samples to " << a.root << "\n";
  return 0;
}

struct VizArgs {
  std::string field, out;
  std::size_t size = kDefaultDenseSize;
};

int cmd_viz(const VizArgs& a) {
  require_file(a.field);
  const CoarseField field = load_field(a.field);
  write_png(a.out, visualize_field(upsample(field, a.size, a.size)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toonwarp: learnable coarse warp fields for face cartoons"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "recover the coarse field mapping input.png onto toon.png");
  fit_cmd->add_option("input", fit.input)->required();
  fit_cmd->add_option("toon", fit.toon)->required();
  fit_cmd->add_option("out", fit.out, "output .atf field")->required();
  fit_cmd->add_option("--iters", fit.iters)->capture_default_str();
  fit_cmd->add_option("--lr", fit.lr)->capture_default_str();
  fit_cmd->add_option("--smooth", fit.smooth, "optional smoothness weight")->capture_default_str();
  fit_cmd->add_option("--size", fit.size, "resize both images to size x size first");
  fit_cmd->add_option("--history", fit.history, "residual CSV (default: <out>.csv)");

  FitDatasetArgs fit_ds;
  auto* fit_ds_cmd = app.add_subcommand("fit-dataset", "fit field.atf for every sample of a dataset directory");
  fit_ds_cmd->add_option("root", fit_ds.root)->required();
  fit_ds_cmd->add_option("--iters", fit_ds.iters)->capture_default_str();
  fit_ds_cmd->add_option("--lr", fit_ds.lr)->capture_default_str();
  fit_ds_cmd->add_option("--smooth", fit_ds.smooth)->capture_default_str();
  fit_ds_cmd->add_option("--size", fit_ds.size)->capture_default_str();

  WarpArgs warp_args;
  auto* warp_cmd = app.add_subcommand("warp", "apply a (scaled) field to an image");
  warp_cmd->add_option("input", warp_args.input)->required();
  warp_cmd->add_option("field", warp_args.field)->required();
  warp_cmd->add_option("out", warp_args.out)->required();
  warp_cmd->add_option("--alpha", warp_args.alphas, "scaling factor(s), comma separated")->delimiter(',');
  warp_cmd->add_option("--size", warp_args.size, "resize the input to size x size first");

  WarpArgs transfer_args;
  auto* transfer_cmd = app.add_subcommand("transfer", "warp an arbitrary (e.g. stylized) image with a saved field");
  transfer_cmd->add_option("styled", transfer_args.input)->required();
  transfer_cmd->add_option("field", transfer_args.field)->required();
  transfer_cmd->add_option("out", transfer_args.out)->required();
  transfer_cmd->add_option("--alpha", transfer_args.alphas)->delimiter(',');
  transfer_cmd->add_option("--size", transfer_args.size);

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "train the perceiver on a dataset with ground-truth fields");
  train_cmd->add_option("root", tr.root)->required();
  train_cmd->add_option("checkpoint", tr.checkpoint)->required();
  train_cmd->add_option("--epochs", tr.epochs)->capture_default_str();
  train_cmd->add_option("--batch", tr.batch)->capture_default_str();
  train_cmd->add_option("--lr", tr.lr)->capture_default_str();
  train_cmd->add_option("--lr-decay", tr.lr_decay)->capture_default_str();
  train_cmd->add_option("--seed", tr.seed)->capture_default_str();
  train_cmd->add_option("--size", tr.size)->capture_default_str();
  train_cmd->add_option("--lambda1", tr.lambda1)->capture_default_str();
  train_cmd->add_option("--lambda2", tr.lambda2)->capture_default_str();
  train_cmd->add_option("--lambda3", tr.lambda3)->capture_default_str();
  train_cmd->add_flag("--no-flip", tr.no_flip);
  train_cmd->add_flag("--no-jitter", tr.no_jitter);
  train_cmd->add_flag("--no-coords", tr.no_coords, "drop the coordinate input planes");
  train_cmd->add_option("--history", tr.history, "loss CSV (default: <checkpoint>.csv)");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "per-sample losses and input|cartoon|target panels");
  eval_cmd->add_option("root", ev.root)->required();
  eval_cmd->add_option("out_dir", ev.out_dir)->required();
  eval_cmd->add_option("--checkpoint", ev.checkpoint);
  eval_cmd->add_flag("--untrained", ev.untrained, "use a freshly initialized (identity) model");
  eval_cmd->add_option("--seed", ev.seed)->capture_default_str();
  eval_cmd->add_option("--size", ev.size)->capture_default_str();
  eval_cmd->add_option("--alpha", ev.alpha)->capture_default_str();
  eval_cmd->add_option("--lambda1", ev.lambda1)->capture_default_str();
  eval_cmd->add_option("--lambda2", ev.lambda2)->capture_default_str();
  eval_cmd->add_option("--lambda3", ev.lambda3)->capture_default_str();

  SynthArgs sy;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic paired dataset");
  synth_cmd->add_option("root", sy.root)->required();
  synth_cmd->add_option("--n", sy.n)->capture_default_str();
  synth_cmd->add_option("--style", sy.style, "smooth-random | bulge | translation")->capture_default_str();
  synth_cmd->add_option("--seed", sy.seed)->capture_default_str();
  synth_cmd->add_option("--size", sy.size)->capture_default_str();
  synth_cmd->add_option("--magnitude", sy.magnitude)->capture_default_str();
  synth_cmd->add_option("--skin-texture", sy.skin_texture)->capture_default_str();

  VizArgs viz;
  auto* viz_cmd = app.add_subcommand("viz", "render a field as a color-wheel PNG");
  viz_cmd->add_option("field", viz.field)->required();
  viz_cmd->add_option("out", viz.out)->required();
  viz_cmd->add_option("--size", viz.size)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "error: invalid-argument: " << msg << "\n";
    return 2;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit);
    if (*fit_ds_cmd) return cmd_fit_dataset(fit_ds);
    if (*warp_cmd) return cmd_warp(warp_args);
    if (*transfer_cmd) return cmd_warp(transfer_args);
    if (*train_cmd) return cmd_train(tr);
    if (*eval_cmd) return cmd_eval(ev);
    if (*synth_cmd) return cmd_synth(sy);
    if (*viz_cmd) return cmd_viz(viz);
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
