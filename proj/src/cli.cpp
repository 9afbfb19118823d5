#include "soundkit/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <random>
#include <sstream>

#include "soundkit/canonical_json.hpp"
#include "soundkit/error.hpp"
#include "soundkit/fetch.hpp"
#include "soundkit/index.hpp"
#include "soundkit/registry.hpp"
#include "soundkit/validate.hpp"

#ifndef SOUNDKIT_BUILTIN_DATASETS_DIR
#define SOUNDKIT_BUILTIN_DATASETS_DIR "datasets"
#endif

namespace soundkit::cli {

namespace fs = std::filesystem;

Config default_config() { return Config{fs::path(SOUNDKIT_BUILTIN_DATASETS_DIR)}; }

namespace {

std::optional<std::string> lookup(const std::map<std::string, std::string>& env, const char* key) {
  const auto it = env.find(key);
  if (it == env.end()) return std::nullopt;
  return it->second;
}

struct Context {
  const std::map<std::string, std::string>& env;
  std::ostream& out;
  std::ostream& err;
  const Config& config;

  Registry registry() const {
    const auto root = lookup(env, "SOUNDKIT_DATA_HOME");
    std::optional<fs::path> data_root;
    if (root && !root->empty()) data_root = fs::path(*root);
    return Registry::standard(config.builtin_datasets, data_root);
  }

  fs::path data_home(const std::string& flag, const std::string& id) const {
    return resolve_data_home(flag.empty() ? std::nullopt : std::optional(flag),
                             lookup(env, "SOUNDKIT_DATA_HOME"), lookup(env, "HOME"), id);
  }
};

std::set<std::string> split_names(const std::string& list) {
  std::set<std::string> names;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) names.insert(item);
  }
  return names;
}

void print_problems(std::ostream& out, const char* label,
                    const std::map<std::string, std::vector<std::string>>& clips,
                    const std::vector<std::string>& metadata) {
  for (const auto& [clip, fields] : clips) {
    for (const auto& f : fields) out << "  " << label << ": clip " << clip << " field " << f << "\n";
  }
  for (const auto& name : metadata) out << "  " << label << ": metadata " << name << "\n";
}

int cmd_download(const Context& ctx, const std::string& id, const std::string& data_home_flag,
                 const std::string& partial, bool force, bool no_cleanup) {
  const auto manifest = ctx.registry().find(id);
  const auto home = ctx.data_home(data_home_flag, id);
  ctx.err << "Dataset " << manifest.name << " is distributed under: " << manifest.license << "\n";
  DownloadOptions options;
  if (!partial.empty()) options.partial = split_names(partial);
  options.force = force;
  options.cleanup = !no_cleanup;
  options.progress = [&ctx](const std::string& remote, std::uint64_t bytes, std::uint64_t total) {
    if (total != 0 && bytes != total) return;
    ctx.err << "fetched " << remote << " (" << bytes << " bytes)\n";
  };
  const auto summary = download_dataset(manifest, home, options);
  for (const auto& [name, outcome] : summary.outcomes) {
    ctx.out << name << ": " << to_string(outcome) << "\n";
  }
  ctx.out << "bytes transferred: " << summary.bytes_transferred << "\n"
          << "files extracted: " << summary.extracted_files << "\n"
          << "data home: " << home.string() << "\n";
  return kSuccess;
}

int cmd_validate(const Context& ctx, const std::string& id, const std::string& data_home_flag,
                 bool fast, bool json) {
  const auto dataset = open_dataset(ctx.registry().find(id), ctx.data_home(data_home_flag, id));
  const auto report = dataset.validate({fast ? ValidationMode::fast : ValidationMode::full, 0});
  if (json) {
    ctx.out << report_to_document(report);
  } else {
    ctx.out << (report.clean() ? "OK" : "PROBLEMS FOUND") << ": " << id << " (" << to_string(report.mode)
            << " validation, " << report.files_checked << " files checked)\n";
    print_problems(ctx.out, "missing", report.missing_clips, report.missing_metadata);
    print_problems(ctx.out, "invalid", report.invalid_clips, report.invalid_metadata);
    print_problems(ctx.out, "unreadable", report.unreadable_clips, report.unreadable_metadata);
  }
  return report.clean() ? kSuccess : kValidationFailed;
}

int cmd_info(const Context& ctx, const std::string& id) {
  const auto manifest = ctx.registry().find(id);
  const auto dataset = open_dataset(manifest, ctx.data_home("", id));
  std::set<std::string> fields;
  for (const auto& [_, entry] : dataset.index().clips) {
    for (const auto& [f, _v] : entry.fields) fields.insert(f);
  }
  auto& out = ctx.out;
  out << "id: " << manifest.id << "\n"
      << "name: " << manifest.name << "\n"
      << "version: " << manifest.version << "\n"
      << "license: " << manifest.license << "\n"
      << "clips: " << dataset.index().clips.size() << "\n"
      << "files: " << dataset.index().file_count() << "\n"
      << "checksum algorithm: " << to_string(dataset.index().checksum_algorithm) << "\n"
      << "fields:\n";
  for (const auto& f : fields) out << "  " << f << " (" << to_string(manifest.binding(f).kind) << ")\n";
  out << "metadata:\n";
  for (const auto& [name, _] : dataset.index().metadata) {
    out << "  " << name << " (" << to_string(manifest.binding(name).kind) << ")\n";
  }
  out << "remotes:\n";
  for (const auto& [name, r] : manifest.remotes) out << "  " << name << ": " << r.url << "\n";
  out << "data home: " << dataset.data_home().string() << "\n";
  return kSuccess;
}

int cmd_index_build(const Context& ctx, const std::string& root, const std::string& output,
                    const std::string& algo) {
  const auto algorithm = parse_checksum_algorithm(algo);
  if (!algorithm) throw Error(ErrorKind::schema, "unknown checksum algorithm '" + algo + "'");
  const auto index = build_index(fs::absolute(root), *algorithm);
  const auto text = serialize_index(index);
  const fs::path target = fs::absolute(output);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  const auto temp = target.parent_path() / ("." + target.filename().string() + ".tmp-" +
                                            std::to_string(std::random_device{}()));
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(ErrorKind::io, "cannot write " + temp.string());
  }
  fs::rename(temp, target, ec);
  if (ec) throw Error(ErrorKind::io, "cannot write " + target.string() + ": " + ec.message());
  ctx.out << "indexed " << index.clips.size() << " clips, " << index.file_count() << " files ("
          << to_string(index.checksum_algorithm) << ") -> " << target.string() << "\n";
  return kSuccess;
}

int cmd_registry_list(const Context& ctx, bool json) {
  const auto registry = ctx.registry();
  Json datasets = Json::object();
  for (const auto& id : registry.ids()) {
    const auto m = registry.find(id);
    datasets[id] = Json{{"name", m.name}, {"version", m.version}};
  }
  if (json) {
    ctx.out << to_canonical(Json{{"datasets", datasets}});
  } else {
    for (const auto& [id, d] : datasets.items()) {
      ctx.out << id << "\t" << d["version"].get<std::string>() << "\t" << d["name"].get<std::string>()
              << "\n";
    }
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, const std::map<std::string, std::string>& env,
        std::ostream& out, std::ostream& err, const Config& config) {
  CLI::App app{"Download, validate and inspect audio datasets", "soundkit"};
  app.require_subcommand(1);

  std::string id;
  std::string data_home;
  std::string partial;
  std::string root;
  std::string output;
  std::string algo = "sha256";
  bool force = false;
  bool no_cleanup = false;
  bool fast = false;
  bool json = false;

  auto* download = app.add_subcommand("download", "Fetch and unpack a dataset's remotes");
  download->add_option("id", id, "Dataset id")->required();
  download->add_option("--data-home", data_home, "Dataset directory");
  download->add_option("--partial", partial, "Comma-separated remote names");
  download->add_flag("--force", force, "Download even when files are already present");
  download->add_flag("--no-cleanup", no_cleanup, "Keep archives after extraction");

  auto* validate_cmd = app.add_subcommand("validate", "Check local files against the canonical index");
  validate_cmd->add_option("id", id, "Dataset id")->required();
  validate_cmd->add_option("--data-home", data_home, "Dataset directory");
  validate_cmd->add_flag("--fast", fast, "Check existence only");
  validate_cmd->add_flag("--json", json, "Print the canonical report document");

  auto* info = app.add_subcommand("info", "Describe a dataset");
  info->add_option("id", id, "Dataset id")->required();
  auto* cite = app.add_subcommand("cite", "Print the dataset's citation");
  cite->add_option("id", id, "Dataset id")->required();
  auto* license = app.add_subcommand("license", "Print the dataset's license");
  license->add_option("id", id, "Dataset id")->required();

  auto* index = app.add_subcommand("index", "Canonical index tools");
  index->require_subcommand(1);
  auto* index_build = index->add_subcommand("build", "Build an index from a directory tree");
  index_build->add_option("root", root, "Directory to index")->required();
  index_build->add_option("--output", output, "Index file to write")->required();
  index_build->add_option("--algo", algo, "Checksum algorithm")->check(CLI::IsMember({"md5", "sha256"}));

  auto* registry = app.add_subcommand("registry", "Known datasets");
  registry->require_subcommand(1);
  auto* registry_list = registry->add_subcommand("list", "List known datasets");
  registry_list->add_flag("--json", json, "Print a canonical document");

  std::vector<const char*> argv{"soundkit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kFailure;
  }

  const Context ctx{env, out, err, config};
  try {
    if (download->parsed()) return cmd_download(ctx, id, data_home, partial, force, no_cleanup);
    if (validate_cmd->parsed()) return cmd_validate(ctx, id, data_home, fast, json);
    if (info->parsed()) return cmd_info(ctx, id);
    if (cite->parsed()) {
      out << ctx.registry().find(id).citation << "\n";
      return kSuccess;
    }
    if (license->parsed()) {
      out << ctx.registry().find(id).license << "\n";
      return kSuccess;
    }
    if (index_build->parsed()) return cmd_index_build(ctx, root, output, algo);
    if (registry_list->parsed()) return cmd_registry_list(ctx, json);
  } catch (const Error& e) {
    err << "soundkit: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    err << "soundkit: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace soundkit::cli
