#include "l2ai/authorization.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "l2ai/error.hpp"

namespace l2ai {
namespace {

struct RoleInfo {
  Role role;
  std::string_view code;
  std::string_view name;
};

constexpr std::array<RoleInfo, 8> kRoleInfo = {{
    {Role::Doctor, "D", "USER_Doctor"},
    {Role::Nurse, "N", "USER_Nurse"},
    {Role::Patient, "P", "USER_Patient"},
    {Role::Drug, "M", "USER_DRAG"},
    {Role::Hospital, "H", "USER_Hospital"},
    {Role::SystemAdmin, "SA", "USER_SA"},
    {Role::Emergency, "E", "USER_Emergency"},
    {Role::Laboratory, "L", "USER_Laboratory"},
}};

// Kept byte-identical to config/permissions.conf (checked by a unit test).
constexpr std::string_view kDefaultTable =
    R"(# Default role -> scope permissions.
#
#   <role> <scope>[,<scope>...] [<start-minute>-<end-minute>]
#
# Roles are the authorization group codes D N P M H SA E L. "*" grants every
# catalog scope. The optional window is a daily range in minutes since
# midnight, end exclusive; a start greater than the end wraps midnight.
D  read-patient-vitals,read-patient-record,write-patient-record,prescribe-medication,read-prescriptions,read-lab-results
N  read-patient-vitals,read-patient-record,read-prescriptions
P  read-own-vitals,read-own-record
M  read-prescriptions,dispense-medication
H  read-patient-record,manage-devices
SA *
E  read-patient-vitals,read-patient-record,read-lab-results,emergency-override
L  read-lab-results,write-lab-results
)";

constexpr std::uint64_t kMillisPerMinute = 60'000;
constexpr std::uint16_t kMinutesPerDay = 1440;

[[noreturn]] void config_error(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": " + what);
}

std::uint16_t parse_minute(std::string_view s, std::size_t line_no) {
  if (s.empty() || s.size() > 4 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    config_error(line_no, "bad minute '" + std::string(s) + "'");
  const int v = std::stoi(std::string(s));
  if (v > kMinutesPerDay) config_error(line_no, "minute out of range: " + std::string(s));
  return static_cast<std::uint16_t>(v);
}

}  // namespace

std::string_view role_code(Role role) noexcept { return kRoleInfo[static_cast<std::size_t>(role)].code; }

std::string_view role_name(Role role) noexcept { return kRoleInfo[static_cast<std::size_t>(role)].name; }

Role parse_role(std::string_view text) {
  for (const auto& info : kRoleInfo)
    if (text == info.code || text == info.name) return info.role;
  throw Error(ErrorCode::InvalidRole, "unknown role '" + std::string(text) + "'");
}

Role role_from_byte(std::uint8_t b) {
  if (b >= kRoleInfo.size()) throw Error(ErrorCode::InvalidRole, "role byte " + std::to_string(b));
  return static_cast<Role>(b);
}

const std::vector<std::string_view>& scope_catalog() {
  static const std::vector<std::string_view> catalog = {
      "read-patient-vitals", "read-patient-record",  "write-patient-record", "read-own-vitals",
      "read-own-record",     "read-other-patient-vitals", "prescribe-medication", "read-prescriptions",
      "dispense-medication", "read-lab-results",     "write-lab-results",    "manage-devices",
      "manage-users",        "emergency-override",
  };
  return catalog;
}

bool is_known_scope(std::string_view scope) {
  const auto& c = scope_catalog();
  return std::find(c.begin(), c.end(), scope) != c.end();
}

bool TimeWindow::contains(Timestamp at) const noexcept {
  const auto minute = static_cast<std::uint16_t>((at.millis / kMillisPerMinute) % kMinutesPerDay);
  if (start_minute <= end_minute) return minute >= start_minute && minute < end_minute;
  return minute >= start_minute || minute < end_minute;
}

std::string_view PermissionTable::default_text() { return kDefaultTable; }

PermissionTable PermissionTable::defaults() { return parse(kDefaultTable); }

PermissionTable PermissionTable::parse(std::string_view text) {
  PermissionTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string role_text, scopes_text, window_text, extra;
    if (!(fields >> role_text)) continue;
    if (!(fields >> scopes_text)) config_error(line_no, "missing scope list");
    fields >> window_text;
    if (fields >> extra) config_error(line_no, "unexpected token '" + extra + "'");

    Role role{};
    try {
      role = parse_role(role_text);
    } catch (const Error&) {
      config_error(line_no, "unknown role '" + role_text + "'");
    }
    if (table.grants_.count(role)) config_error(line_no, "duplicate role '" + role_text + "'");

    RoleGrant grant;
    if (scopes_text == "*") {
      grant.all_scopes = true;
    } else {
      std::istringstream list(scopes_text);
      std::string scope;
      while (std::getline(list, scope, ',')) {
        if (!is_known_scope(scope)) config_error(line_no, "unknown scope '" + scope + "'");
        grant.scopes.insert(scope);
      }
      if (grant.scopes.empty()) config_error(line_no, "empty scope list");
    }
    if (!window_text.empty()) {
      const auto dash = window_text.find('-');
      if (dash == std::string::npos) config_error(line_no, "window must be <start>-<end>");
      grant.window = TimeWindow{parse_minute(std::string_view(window_text).substr(0, dash), line_no),
                                parse_minute(std::string_view(window_text).substr(dash + 1), line_no)};
    }
    table.grants_.emplace(role, std::move(grant));
  }
  // Administrator totality.
  auto& sa = table.grants_[Role::SystemAdmin];
  sa.all_scopes = true;
  sa.window.reset();
  return table;
}

PermissionTable PermissionTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open permission table " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool PermissionTable::allows(Role role, std::string_view scope, Timestamp at) const {
  const RoleGrant* g = grant(role);
  if (g == nullptr || !is_known_scope(scope)) return false;
  if (g->window && !g->window->contains(at)) return false;
  return g->all_scopes || g->scopes.find(scope) != g->scopes.end();
}

bool PermissionTable::has_role(Role role) const { return grants_.count(role) != 0; }

std::size_t PermissionTable::role_count() const { return grants_.size(); }

const RoleGrant* PermissionTable::grant(Role role) const {
  const auto it = grants_.find(role);
  return it == grants_.end() ? nullptr : &it->second;
}

std::optional<Scope> PermissionTable::default_scope(Role role) const {
  const RoleGrant* g = grant(role);
  if (g == nullptr) return std::nullopt;
  for (std::string_view s : scope_catalog())
    if (g->all_scopes || g->scopes.count(s)) return Scope(s);
  return std::nullopt;
}

}  // namespace l2ai
