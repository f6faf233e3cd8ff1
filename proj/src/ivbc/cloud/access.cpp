#include "ivbc/cloud/access.hpp"

namespace ivbc::cloud {

const char* access_role_name(AccessRole r) {
    switch (r) {
    case AccessRole::Owner: return "owner";
    case AccessRole::Hospital: return "hospital";
    case AccessRole::Insurance: return "insurance";
    case AccessRole::Police: return "police";
    case AccessRole::Public: return "public";
    }
    return "unknown";
}

std::optional<AccessRole> access_role_from_name(std::string_view name) {
    if (name == "owner") return AccessRole::Owner;
    if (name == "hospital") return AccessRole::Hospital;
    if (name == "insurance") return AccessRole::Insurance;
    if (name == "police") return AccessRole::Police;
    if (name == "public") return AccessRole::Public;
    return std::nullopt;
}

const char* record_scope_name(RecordScope s) {
    switch (s) {
    case RecordScope::BlockHeaders: return "headers";
    case RecordScope::Transactions: return "transactions";
    case RecordScope::Messages: return "messages";
    case RecordScope::Reputation: return "reputation";
    }
    return "unknown";
}

std::optional<RecordScope> record_scope_from_name(std::string_view name) {
    if (name == "headers") return RecordScope::BlockHeaders;
    if (name == "transactions") return RecordScope::Transactions;
    if (name == "messages") return RecordScope::Messages;
    if (name == "reputation") return RecordScope::Reputation;
    return std::nullopt;
}

std::vector<AccessRole> all_access_roles() {
    return {AccessRole::Owner, AccessRole::Hospital, AccessRole::Insurance, AccessRole::Police,
            AccessRole::Public};
}

std::vector<RecordScope> all_record_scopes() {
    return {RecordScope::BlockHeaders, RecordScope::Transactions, RecordScope::Messages,
            RecordScope::Reputation};
}

bool role_allows(AccessRole role, RecordScope scope) {
    switch (role) {
    case AccessRole::Public:
        return scope == RecordScope::BlockHeaders;
    case AccessRole::Owner:
    case AccessRole::Hospital:
    case AccessRole::Insurance:
    case AccessRole::Police:
        return scope == RecordScope::BlockHeaders || scope == RecordScope::Transactions ||
               scope == RecordScope::Messages || scope == RecordScope::Reputation;
    }
    return false; // anything unlisted is denied
}

} // namespace ivbc::cloud
