#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ivbc::cloud {

enum class AccessRole : std::uint8_t {
    Owner,
    Hospital,
    Insurance,
    Police,
    Public,
};

/// Queryable record classes, gated per role.
enum class RecordScope : std::uint8_t {
    BlockHeaders,
    Transactions,
    Messages,
    Reputation,
};

const char* access_role_name(AccessRole r);
std::optional<AccessRole> access_role_from_name(std::string_view name);
const char* record_scope_name(RecordScope s);
std::optional<RecordScope> record_scope_from_name(std::string_view name);

std::vector<AccessRole> all_access_roles();
std::vector<RecordScope> all_record_scopes();

/// Deny-by-default scope table. The public sees block headers only; the
/// owner sees everything about its own vehicle (ownership of the queried
/// vehicle is asserted by the caller); authorized organizations see the
/// full history of any vehicle.
bool role_allows(AccessRole role, RecordScope scope);

struct AccessDenied : std::runtime_error {
    AccessDenied(AccessRole role, RecordScope scope)
        : std::runtime_error(std::string("role '") + access_role_name(role) +
                             "' may not query " + record_scope_name(scope)),
          role(role), scope(scope) {}
    AccessRole role;
    RecordScope scope;
};

} // namespace ivbc::cloud
