#include "canary/token_store.hpp"

#include <mutex>
#include <sstream>

#include "canary/error.hpp"
#include "json.hpp"

namespace canary {

using nlohmann::json;

std::string slot_name(int slot_id) { return "CT" + std::to_string(slot_id); }

ExclusionScope parse_exclusion_scope(std::string_view text) {
  if (text == "slot") return ExclusionScope::Slot;
  if (text == "site") return ExclusionScope::Site;
  if (text == "store") return ExclusionScope::Store;
  throw ConfigError("unknown exclusion scope '" + std::string(text) + "' (slot|site|store)");
}

namespace {

std::string scope_bucket(ExclusionScope scope, const std::string& site, int slot) {
  switch (scope) {
    case ExclusionScope::Slot: return site + '\x1f' + std::to_string(slot);
    case ExclusionScope::Site: return site;
    case ExclusionScope::Store: return {};
  }
  return {};
}

json assignment_json(const TokenAssignment& a) {
  json values = json::object();
  for (const auto& [slot, v] : a.values) values[slot_name(slot)] = v;
  return {{"type", "assignment"},
          {"site_id", a.site_id},
          {"user_agent", a.fingerprint.user_agent},
          {"asn", a.fingerprint.asn},
          {"values", values},
          {"created_at", to_rfc3339(a.created_at)}};
}

TokenAssignment assignment_from_json(const json& j) {
  TokenAssignment a;
  a.site_id = j.at("site_id").get<std::string>();
  a.fingerprint.user_agent = j.at("user_agent").get<std::string>();
  a.fingerprint.asn = j.at("asn").get<std::uint32_t>();
  for (const auto& [k, v] : j.at("values").items()) {
    if (k.size() < 3 || k.rfind("CT", 0) != 0) throw DataIntegrityError("bad slot name '" + k + "' in store");
    a.values[std::stoi(k.substr(2))] = v.get<std::string>();
  }
  a.created_at = parse_rfc3339(j.at("created_at").get<std::string>());
  return a;
}

json binding_json(const std::string& site, int slot, const SlotBinding& b) {
  return {{"type", "binding"}, {"site_id", site}, {"slot", slot}, {"space_id", b.space_id},
          {"kind", std::string(to_string(b.kind))}};
}

}  // namespace

TokenStore::TokenStore(TokenPolicy policy) : policy_(std::move(policy)) {}

TokenStore::TokenStore(const std::filesystem::path& dir, TokenPolicy policy) : policy_(std::move(policy)), dir_(dir) {
  std::filesystem::create_directories(dir_);
  load();
  log_.open(dir_ / "assignments.log", std::ios::app | std::ios::binary);
  if (!log_) throw ConfigError("cannot open store log in " + dir_.string());
}

TokenStore::~TokenStore() = default;

void TokenStore::register_space(ValueSpace space) {
  std::unique_lock lock(mu_);
  auto id = space.id();
  spaces_.insert_or_assign(id, std::move(space));
}

const ValueSpace* TokenStore::space(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = spaces_.find(id);
  return it == spaces_.end() ? nullptr : &it->second;
}

void TokenStore::add_global_reserved_text(std::string_view text) {
  std::unique_lock lock(mu_);
  global_reserved_ += ascii_lower(text);
  global_reserved_ += '\n';
}

void TokenStore::register_site(const std::string& site_id, const std::map<int, std::string>& slot_spaces,
                               std::string reserved_text) {
  std::unique_lock lock(mu_);
  if (slot_spaces.size() != kSlotsPerSite)
    throw ConfigError("site '" + site_id + "' must bind exactly " + std::to_string(kSlotsPerSite) + " slots");
  bool has_assignments = false;
  for (const auto& [key, _] : assignments_)
    if (key.first == site_id) {
      has_assignments = true;
      break;
    }
  auto& current = bindings_[site_id];
  for (const auto& [slot, space_id] : slot_spaces) {
    if (slot < 1 || slot > kSlotsPerSite) throw ConfigError("site '" + site_id + "': slot out of range");
    auto sp = spaces_.find(space_id);
    if (sp == spaces_.end()) throw ConfigError("site '" + site_id + "': unknown value space '" + space_id + "'");
    SlotBinding b{space_id, sp->second.kind()};
    auto it = current.find(slot);
    if (it != current.end()) {
      if (it->second.space_id == b.space_id && it->second.kind == b.kind) continue;
      if (has_assignments)
        throw ConfigError("site '" + site_id + "' slot " + slot_name(slot) +
                          " already has assignments drawn from space '" + it->second.space_id + "'");
    }
    current[slot] = b;
    if (!dir_.empty()) append_line(binding_json(site_id, slot, b).dump());
  }
  reserved_[site_id] = ascii_lower(reserved_text);
}

std::optional<SlotBinding> TokenStore::binding(const std::string& site_id, int slot_id) const {
  std::shared_lock lock(mu_);
  auto s = bindings_.find(site_id);
  if (s == bindings_.end()) return std::nullopt;
  auto b = s->second.find(slot_id);
  if (b == s->second.end()) return std::nullopt;
  return b->second;
}

std::vector<std::string> TokenStore::sites() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [site, _] : bindings_) out.push_back(site);
  return out;
}

bool TokenStore::admissible(const std::string& site_id, int slot_id, const std::string& key) const {
  auto bucket = used_.find(scope_bucket(policy_.scope, site_id, slot_id));
  if (bucket != used_.end() && bucket->second.contains(key)) return false;
  if (auto r = reserved_.find(site_id); r != reserved_.end() && contains_at_boundary(r->second, key)) return false;
  if (contains_at_boundary(global_reserved_, key)) return false;
  return true;
}

std::string TokenStore::draw_value(const std::string& site_id, int slot_id, const ScraperFingerprint& fp,
                                   const ValueSpace& space) const {
  std::uint64_t seed = fnv1a64(policy_.secret_key);
  seed = mix64(seed ^ fnv1a64(site_id));
  seed = mix64(seed ^ static_cast<std::uint64_t>(slot_id));
  seed = mix64(seed ^ fp.stable_hash());
  Rng rng(seed);
  constexpr int kRejectionTries = 256;
  for (int i = 0; i < kRejectionTries; ++i) {
    auto v = space.sample(rng);
    if (admissible(site_id, slot_id, comparison_key(v))) return v;
  }
  // Dense space: pick uniformly among what is left.
  constexpr std::uint64_t kEnumerationLimit = 20'000'000;
  if (space.cardinality() <= kEnumerationLimit) {
    std::vector<std::uint64_t> free;
    for (std::uint64_t i = 0; i < space.cardinality(); ++i)
      if (admissible(site_id, slot_id, comparison_key(space.value_at(i)))) free.push_back(i);
    if (!free.empty()) return space.value_at(free[rng.below(free.size())]);
  }
  throw CapacityError("value space '" + space.id() + "' exhausted for site '" + site_id + "' slot " +
                      slot_name(slot_id));
}

void TokenStore::index_values(const TokenAssignment& a) {
  for (const auto& [slot, v] : a.values) used_[scope_bucket(policy_.scope, a.site_id, slot)].insert(comparison_key(v));
}

TokenStore::Lookup TokenStore::get_or_create(const std::string& site_id, const ScraperFingerprint& fp, Timestamp now) {
  Key key{site_id, fp};
  {
    std::shared_lock lock(mu_);
    if (auto it = assignments_.find(key); it != assignments_.end()) return {it->second, false};
  }
  std::unique_lock lock(mu_);
  if (auto it = assignments_.find(key); it != assignments_.end()) return {it->second, false};
  auto site = bindings_.find(site_id);
  if (site == bindings_.end()) throw NotFoundError("site '" + site_id + "' is not registered with the token store");

  TokenAssignment a{site_id, fp, {}, now};
  // Draws within one assignment also exclude each other under Site/Store.
  std::vector<std::pair<std::string, std::string>> staged;
  for (const auto& [slot, b] : site->second) {
    auto sp = spaces_.find(b.space_id);
    if (sp == spaces_.end()) throw ConfigError("value space '" + b.space_id + "' is not loaded");
    auto v = draw_value(site_id, slot, fp, sp->second);
    auto bucket = scope_bucket(policy_.scope, site_id, slot);
    auto k = comparison_key(v);
    used_[bucket].insert(k);
    staged.emplace_back(std::move(bucket), std::move(k));
    a.values[slot] = std::move(v);
  }
  try {
    if (!dir_.empty()) append_line(assignment_json(a).dump());
  } catch (...) {
    for (const auto& [bucket, k] : staged) used_[bucket].erase(k);
    throw;
  }
  assignments_.emplace(key, a);
  return {std::move(a), true};
}

std::optional<TokenAssignment> TokenStore::find(const std::string& site_id, const ScraperFingerprint& fp) const {
  std::shared_lock lock(mu_);
  auto it = assignments_.find(Key{site_id, fp});
  if (it == assignments_.end()) return std::nullopt;
  return it->second;
}

void TokenStore::import_assignment(const TokenAssignment& a) {
  std::unique_lock lock(mu_);
  Key key{a.site_id, a.fingerprint};
  if (assignments_.contains(key)) throw InputError("assignment already exists for " + a.fingerprint.to_string());
  if (!dir_.empty()) append_line(assignment_json(a).dump());
  index_values(a);
  assignments_.emplace(std::move(key), a);
}

std::vector<TokenAssignment> TokenStore::assignments() const {
  std::shared_lock lock(mu_);
  std::vector<TokenAssignment> out;
  out.reserve(assignments_.size());
  for (const auto& [_, a] : assignments_) out.push_back(a);
  return out;
}

std::size_t TokenStore::size() const {
  std::shared_lock lock(mu_);
  return assignments_.size();
}

void TokenStore::append_line(const std::string& line) {
  log_ << line << '\n';
  log_.flush();
  if (!log_) throw Error("failed to append to store log in " + dir_.string());
}

void TokenStore::apply_record(const std::string& line) {
  auto j = json::parse(line);
  auto type = j.at("type").get<std::string>();
  if (type == "binding") {
    bindings_[j.at("site_id").get<std::string>()][j.at("slot").get<int>()] =
        SlotBinding{j.at("space_id").get<std::string>(), parse_space_kind(j.at("kind").get<std::string>())};
  } else if (type == "assignment") {
    auto a = assignment_from_json(j);
    index_values(a);
    Key key{a.site_id, a.fingerprint};
    assignments_.insert_or_assign(std::move(key), std::move(a));
  } else {
    throw DataIntegrityError("unknown store record type '" + type + "'");
  }
}

void TokenStore::load() {
  std::uintmax_t offset = 0;
  auto index_path = dir_ / "index.json";
  if (std::filesystem::exists(index_path)) {
    std::ifstream in(index_path);
    auto j = json::parse(in);
    offset = j.at("log_offset").get<std::uintmax_t>();
    for (const auto& rec : j.at("records")) apply_record(rec.dump());
  }
  auto log_path = dir_ / "assignments.log";
  if (!std::filesystem::exists(log_path)) return;
  std::ifstream in(log_path, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(offset));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      apply_record(line);
    } catch (const json::exception& e) {
      // A torn final line from a crash is dropped; anything else is corruption.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw DataIntegrityError("store log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void TokenStore::compact() {
  if (dir_.empty()) return;
  std::unique_lock lock(mu_);
  log_.flush();
  json records = json::array();
  for (const auto& [site, slots] : bindings_)
    for (const auto& [slot, b] : slots) records.push_back(binding_json(site, slot, b));
  for (const auto& [_, a] : assignments_) records.push_back(assignment_json(a));
  json index{{"log_offset", std::filesystem::file_size(dir_ / "assignments.log")}, {"records", std::move(records)}};
  auto tmp = dir_ / "index.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << index.dump() << '\n';
    if (!out) throw Error("failed to write " + tmp.string());
  }
  std::filesystem::rename(tmp, dir_ / "index.json");
}

std::string export_assignment_json(const TokenAssignment& a) {
  json j = json::object();
  j["site_id"] = a.site_id;
  j["user_agent"] = a.fingerprint.user_agent;
  j["asn"] = a.fingerprint.asn;
  for (int slot = 1; slot <= kSlotsPerSite; ++slot) {
    auto it = a.values.find(slot);
    j[slot_name(slot)] = it == a.values.end() ? json(nullptr) : json(it->second);
  }
  j["created_at"] = to_rfc3339(a.created_at);
  return j.dump();
}

}  // namespace canary
