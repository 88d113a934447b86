#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "l2ai/clock.hpp"

namespace l2ai {

// Authorization groups. The wire/ledger code is the group letter(s).
enum class Role : std::uint8_t {
  Doctor,
  Nurse,
  Patient,
  Drug,  // pharmacy / drug dispensary
  Hospital,
  SystemAdmin,
  Emergency,
  Laboratory,
};

inline constexpr std::array<Role, 8> kAllRoles = {
    Role::Doctor,      Role::Nurse,     Role::Patient,   Role::Drug,
    Role::Hospital,    Role::SystemAdmin, Role::Emergency, Role::Laboratory,
};

std::string_view role_code(Role role) noexcept;  // "D", "N", ..., "SA", "E", "L"
std::string_view role_name(Role role) noexcept;  // "USER_Doctor", ...

// Accepts the group code or the role name. Throws Error(InvalidRole).
Role parse_role(std::string_view text);
Role role_from_byte(std::uint8_t b);  // throws Error(InvalidRole)

using Scope = std::string;

// Fixed catalog of activity scopes a permission table may reference.
const std::vector<std::string_view>& scope_catalog();
bool is_known_scope(std::string_view scope);

// Daily window in minutes since midnight, [start, end). start > end wraps
// past midnight.
struct TimeWindow {
  std::uint16_t start_minute = 0;
  std::uint16_t end_minute = 1440;

  bool contains(Timestamp at) const noexcept;
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct RoleGrant {
  bool all_scopes = false;
  std::set<Scope, std::less<>> scopes;
  std::optional<TimeWindow> window;
};

// Role -> permitted scopes (+ optional daily window).
//
// Text format, one role per line, '#' starts a comment:
//   <role> <scope>[,<scope>...] [<start-minute>-<end-minute>]
// "*" grants every catalog scope. SystemAdmin is total regardless of the table.
class PermissionTable {
 public:
  static PermissionTable defaults();
  static std::string_view default_text();

  // Throws Error(ConfigError) naming the offending line.
  static PermissionTable parse(std::string_view text);
  static PermissionTable load(const std::filesystem::path& path);

  bool allows(Role role, std::string_view scope, Timestamp at) const;
  bool has_role(Role role) const;
  std::size_t role_count() const;
  const RoleGrant* grant(Role role) const;

  // First catalog scope the role may use, or nullopt.
  std::optional<Scope> default_scope(Role role) const;

 private:
  std::map<Role, RoleGrant> grants_;
};

}  // namespace l2ai
