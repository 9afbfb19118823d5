#include "soundkit/registry.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <set>

#include "soundkit/error.hpp"
#include "soundkit/paths.hpp"

namespace soundkit {

namespace fs = std::filesystem;

Registry::Registry(std::vector<fs::path> directories) : directories_(std::move(directories)) {}

Registry Registry::standard(const fs::path& builtin_dir, const std::optional<fs::path>& data_root) {
  std::vector<fs::path> dirs{builtin_dir};
  if (data_root) dirs.push_back(*data_root / "manifests");
  return Registry(std::move(dirs));
}

namespace {

std::string read_whole(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot read " + path.string() + ": " + std::strerror(errno));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::io, "read error on " + path.string());
  return text;
}

DatasetManifest load_manifest_file(const fs::path& path, std::string_view expected_id) {
  DatasetManifest m;
  try {
    m = load_manifest(read_whole(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
  if (m.id != expected_id) {
    fail(ErrorKind::schema, path.string() + ": id '" + m.id + "' does not match file name");
  }
  m.origin_dir = path.parent_path();
  return m;
}

}  // namespace

std::vector<std::string> Registry::ids() const {
  std::set<std::string> ids;
  for (const auto& dir : directories_) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) continue;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
      const auto stem = entry.path().stem().string();
      load_manifest_file(entry.path(), stem);
      ids.insert(stem);
    }
  }
  return {ids.begin(), ids.end()};
}

DatasetManifest Registry::find(std::string_view id) const {
  if (!is_valid_dataset_id(id)) {
    fail(ErrorKind::unknown_dataset, "unknown dataset '" + std::string(id) + "'");
  }
  for (auto dir = directories_.rbegin(); dir != directories_.rend(); ++dir) {
    const auto path = *dir / (std::string(id) + ".json");
    std::error_code ec;
    if (fs::is_regular_file(path, ec)) return load_manifest_file(path, id);
  }
  fail(ErrorKind::unknown_dataset, "unknown dataset '" + std::string(id) + "'");
}

fs::path resolve_data_home(const std::optional<std::string>& flag,
                           const std::optional<std::string>& env_data_root,
                           const std::optional<std::string>& home, std::string_view dataset_id) {
  if (flag && !flag->empty()) return fs::absolute(*flag);
  if (env_data_root && !env_data_root->empty()) return fs::absolute(*env_data_root) / dataset_id;
  const fs::path base = home && !home->empty() ? fs::path(*home) : fs::current_path();
  return fs::absolute(base / "sound_datasets" / dataset_id);
}

namespace {

class LocalFiles final : public FileSource {
 public:
  std::string read(const fs::path& path) const override { return read_whole(path); }
};

}  // namespace

std::shared_ptr<const FileSource> local_files() {
  static const auto instance = std::make_shared<const LocalFiles>();
  return instance;
}

struct Dataset::State {
  DatasetManifest manifest;
  DatasetIndex index;
  fs::path data_home;
  std::shared_ptr<const FileSource> files;

  mutable std::mutex mutex;
  mutable std::map<std::pair<std::string, std::string>, std::shared_ptr<const Annotation>> cache;
};

Dataset::Dataset(std::shared_ptr<State> state) : state_(std::move(state)) {}

Dataset Dataset::open(DatasetManifest manifest, fs::path data_home,
                      std::shared_ptr<const FileSource> files) {
  const fs::path base = manifest.origin_dir.empty() ? data_home : manifest.origin_dir;
  const auto index_path = resolve_under(base, manifest.index_ref);
  std::string bytes;
  try {
    bytes = files->read(index_path);
  } catch (const Error& e) {
    fail(ErrorKind::io, "cannot read index " + index_path.string() + ": " + e.what());
  }
  auto state = std::make_shared<State>();
  try {
    state->index = parse_index(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), index_path.string() + ": " + e.what());
  }
  state->manifest = std::move(manifest);
  state->data_home = std::move(data_home);
  state->files = std::move(files);
  return Dataset(std::move(state));
}

const DatasetManifest& Dataset::manifest() const noexcept { return state_->manifest; }
const DatasetIndex& Dataset::index() const noexcept { return state_->index; }
const fs::path& Dataset::data_home() const noexcept { return state_->data_home; }
const std::string& Dataset::cite() const noexcept { return state_->manifest.citation; }
const std::string& Dataset::license() const noexcept { return state_->manifest.license; }

std::vector<ClipId> Dataset::clip_ids() const {
  std::vector<ClipId> ids;
  ids.reserve(state_->index.clips.size());
  for (const auto& [id, _] : state_->index.clips) ids.push_back(id);
  return ids;  // std::map over ClipId is already bytewise ascending
}

Clip Dataset::get_clip(std::string_view id) const {
  if (!is_valid_clip_id(id)) fail(ErrorKind::unknown_clip, "unknown clip '" + std::string(id) + "'");
  const auto it = state_->index.clips.find(ClipId(std::string(id)));
  if (it == state_->index.clips.end()) {
    fail(ErrorKind::unknown_clip, "unknown clip '" + std::string(id) + "'");
  }
  Clip clip{it->first, {}, {}};
  for (const auto& [field, value] : it->second.fields) {
    clip.fields.emplace(field, value ? std::optional(resolve_under(state_->data_home, value->path))
                                     : std::nullopt);
  }
  return clip;
}

namespace {

Annotation parse_as(const FieldBinding& binding, std::string bytes) {
  switch (binding.kind) {
    case BindingKind::audio_wav: return load_audio(bytes);
    case BindingKind::tags: return parse_tags(bytes, binding.format.delimiter);
    case BindingKind::events: return parse_events(bytes, binding.format);
    case BindingKind::metadata_table: return parse_metadata_table(bytes);
    case BindingKind::raw: break;
  }
  return RawBytes{std::move(bytes)};
}

std::shared_ptr<const Annotation> cached_parse(
    std::mutex& mutex,
    std::map<std::pair<std::string, std::string>, std::shared_ptr<const Annotation>>& cache,
    const std::pair<std::string, std::string>& key, const FileSource& files, const fs::path& path,
    const FieldBinding& binding, const std::string& context) {
  {
    std::lock_guard lock(mutex);
    if (const auto it = cache.find(key); it != cache.end()) return it->second;
  }
  std::shared_ptr<const Annotation> parsed;
  try {
    parsed = std::make_shared<const Annotation>(parse_as(binding, files.read(path)));
  } catch (const Error& e) {
    throw Error(e.kind(), context + ": " + e.what(), e.line());
  }
  std::lock_guard lock(mutex);
  // A racing thread may have parsed the same key; keep the first result.
  return cache.emplace(key, std::move(parsed)).first->second;
}

}  // namespace

std::shared_ptr<const Annotation> Dataset::clip_annotation(const Clip& clip,
                                                           const std::string& field) const {
  const auto context = "clip '" + clip.id.str() + "' field '" + field + "'";
  const auto it = clip.fields.find(field);
  if (it == clip.fields.end()) fail(ErrorKind::schema, context + ": no such field");
  if (!it->second) fail(ErrorKind::absent_field, context + ": field is absent for this clip");
  return cached_parse(state_->mutex, state_->cache, {clip.id.str(), field}, *state_->files,
                      *it->second, state_->manifest.binding(field), context);
}

std::shared_ptr<const Annotation> Dataset::metadata_annotation(const std::string& name) const {
  const auto context = "metadata '" + name + "'";
  const auto it = state_->index.metadata.find(name);
  if (it == state_->index.metadata.end()) fail(ErrorKind::schema, context + ": no such entry");
  // Metadata keys cannot collide with clip keys: clip ids are never empty.
  return cached_parse(state_->mutex, state_->cache, {"", name}, *state_->files,
                      resolve_under(state_->data_home, it->second.path),
                      state_->manifest.binding(name), context);
}

Clip Dataset::with_extras(Clip clip) const {
  for (const auto& [name, _] : state_->index.metadata) {
    if (state_->manifest.binding(name).kind != BindingKind::metadata_table) continue;
    const auto table = metadata_annotation(name);
    const auto& rows = std::get<MetadataTable>(*table).rows;
    const auto row = rows.find(clip.id.str());
    if (row == rows.end()) continue;
    for (const auto& [column, value] : row->second) clip.extras[name + "." + column] = value;
  }
  return clip;
}

ValidationReport Dataset::validate(const ValidateOptions& options) const {
  return soundkit::validate(state_->index, state_->data_home, options);
}

}  // namespace soundkit
