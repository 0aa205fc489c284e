#include "imtriage/artifacts.hpp"
#include "imtriage/diagnostics.hpp"

#include <algorithm>
#include <tuple>

namespace imtriage {

std::string_view to_string(App app) noexcept {
  return app == App::WhatsApp ? "whatsapp" : "viber";
}

std::string_view to_string(StoreKind kind) noexcept {
  switch (kind) {
    case StoreKind::MessageDb: return "message-db";
    case StoreKind::ContactDb: return "contact-db";
    case StoreKind::CallLogDb: return "call-log-db";
    case StoreKind::ViberDataDb: return "viber-data-db";
    case StoreKind::ViberMessagesDb: return "viber-messages-db";
    case StoreKind::MediaDir: return "media-dir";
    case StoreKind::AvatarDir: return "avatar-dir";
    case StoreKind::EncryptedBackup: return "encrypted-backup";
    case StoreKind::UnclassifiedDb: return "unclassified-db";
  }
  return "?";
}

std::string_view to_string(Confidence c) noexcept {
  switch (c) {
    case Confidence::PathAndMagic: return "path-and-magic";
    case Confidence::PathOnly: return "path-only";
    case Confidence::MagicOnly: return "magic-only";
  }
  return "?";
}

std::string_view to_string(MessageDirection d) noexcept {
  return d == MessageDirection::Incoming ? "incoming" : "outgoing";
}

std::string_view to_string(CallDirection d) noexcept {
  switch (d) {
    case CallDirection::Incoming: return "incoming";
    case CallDirection::Outgoing: return "outgoing";
    case CallDirection::Missed: return "missed";
    case CallDirection::Unknown: return "unknown";
  }
  return "?";
}

std::string_view to_string(MediaStatus s) noexcept {
  return s == MediaStatus::Resolved ? "resolved" : "unresolved";
}

bool is_database_kind(StoreKind kind) noexcept {
  switch (kind) {
    case StoreKind::MessageDb:
    case StoreKind::ContactDb:
    case StoreKind::CallLogDb:
    case StoreKind::ViberDataDb:
    case StoreKind::ViberMessagesDb:
    case StoreKind::UnclassifiedDb:
      return true;
    default:
      return false;
  }
}

bool kind_belongs_to(StoreKind kind, App app) noexcept {
  switch (kind) {
    case StoreKind::MessageDb:
    case StoreKind::ContactDb:
    case StoreKind::MediaDir:
    case StoreKind::AvatarDir:
    case StoreKind::EncryptedBackup:
      return app == App::WhatsApp;
    default:
      return app == App::Viber;
  }
}

bool store_order(const ArtifactStore& a, const ArtifactStore& b) {
  return std::tie(a.app, a.kind, a.path) < std::tie(b.app, b.kind, b.path);
}

// ---------------------------------------------------------------------------

Diagnostics::Diagnostics(const Diagnostics& other) {
  std::lock_guard lock(other.mu_);
  warnings_ = other.warnings_;
  damage_ = other.damage_;
  assumptions_ = other.assumptions_;
}

Diagnostics& Diagnostics::operator=(const Diagnostics& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  warnings_ = other.warnings_;
  damage_ = other.damage_;
  assumptions_ = other.assumptions_;
  return *this;
}

void Diagnostics::warn(Warning w) {
  std::lock_guard lock(mu_);
  warnings_.push_back(std::move(w));
}

void Diagnostics::damage(StoreDamage d) {
  std::lock_guard lock(mu_);
  damage_.push_back(std::move(d));
}

void Diagnostics::assume(std::string id, std::string detail) {
  std::lock_guard lock(mu_);
  assumptions_.emplace(std::move(id), std::move(detail));
}

void Diagnostics::merge(const Diagnostics& other) {
  if (this == &other) return;
  std::scoped_lock lock(mu_, other.mu_);
  warnings_.insert(warnings_.end(), other.warnings_.begin(), other.warnings_.end());
  damage_.insert(damage_.end(), other.damage_.begin(), other.damage_.end());
  for (const auto& [id, detail] : other.assumptions_) assumptions_.emplace(id, detail);
}

std::vector<Warning> Diagnostics::warnings() const {
  std::lock_guard lock(mu_);
  auto out = warnings_;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<StoreDamage> Diagnostics::damages() const {
  std::lock_guard lock(mu_);
  auto out = damage_;
  std::sort(out.begin(), out.end(), [](const StoreDamage& a, const StoreDamage& b) {
    return std::tie(a.store_path, a.table, a.page) < std::tie(b.store_path, b.table, b.page);
  });
  return out;
}

std::vector<Assumption> Diagnostics::assumptions() const {
  std::lock_guard lock(mu_);
  std::vector<Assumption> out;
  for (const auto& [id, detail] : assumptions_) out.push_back({id, detail});
  return out;
}

std::size_t Diagnostics::warning_count() const {
  std::lock_guard lock(mu_);
  return warnings_.size();
}

std::size_t Diagnostics::warning_count(std::string_view code) const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count_if(
      warnings_.begin(), warnings_.end(), [&](const Warning& w) { return w.code == code; }));
}

}  // namespace imtriage
