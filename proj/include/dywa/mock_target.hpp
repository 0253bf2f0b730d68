// In-process mock of the vulnerable web application the bundled models
// describe. Tests, the demo, and rehearsal runs execute attack plans against
// it; every weakness sits behind a switch so countermeasure variants can be
// exercised. It binds to loopback only and leaks a fixed marker string, never
// real files.
#pragma once

#include <memory>
#include <string>

namespace dywa {

struct MockSwitches {
  bool login_sqli = true;          // login form concatenates the username
  bool db_file_read_priv = true;   // database user may LOAD_FILE
  bool db_file_write_priv = true;  // database user may write files
  bool edit_sqli = true;           // profile edit concatenates the name
  bool upload_unrestricted = true; // avatar upload skips the extension check
  bool include_traversal = true;   // page include accepts path traversal
};

// The string standing in for /etc/passwd in every leak the mock serves.
const std::string& mock_secret();

class MockTarget {
 public:
  // An empty secret falls back to mock_secret().
  explicit MockTarget(MockSwitches switches = {}, std::string secret = "");
  ~MockTarget();
  MockTarget(const MockTarget&) = delete;
  MockTarget& operator=(const MockTarget&) = delete;

  // Binds 127.0.0.1 and serves on a background thread; port 0 picks an
  // ephemeral port. Returns false when the bind fails.
  bool start(int port = 0);
  void stop();

  int port() const;
  std::string base_url() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dywa
