#include "dywa/bundled.hpp"

namespace dywa {

namespace {

const char* multistage_model = R"raw(model multistage;

agents Client, WebApp, DB, FS;

constants login, dashboard, loginfail, profileid, edit, editfail, file : public;

entity WebApp {
  if (Client -> WebApp : login.?Username.?Password) @keys(Username = usr, Password = pwd) {
    WebApp -> DB : query(Username.Password);
    DB -> WebApp : ?SQLresponse;
    if (SQLresponse == tuple(*)) {
      AuthCookie := fresh();
      sessionValue(AuthCookie);
      WebApp -> Client : dashboard.AuthCookie.SQLresponse;
    } else {
      WebApp -> Client : loginfail;
    }
  }
  elseif (Client -> WebApp : profileid.?IDvalue.?AuthCookie & sessionValue(AuthCookie)) @tag(tag3) @keys(IDvalue = id) {
    WebApp -> DB : query(sanitized(IDvalue));
    DB -> WebApp : ?SQLresponse;
    WebApp -> Client : profileid.SQLresponse;
  }
  elseif (Client -> WebApp : edit.?Name.?Surname.?Phone.?Avatar.?AuthCookie & sessionValue(AuthCookie)) @tag(tag2) @keys(Name = name, Surname = surname, Phone = phone, Avatar = avatar) {
    WebApp -> DB : query(Name.Surname.Phone);
    DB -> WebApp : ?SQLresponse;
    if (SQLresponse == tuple(*)) {
      WebApp -> FS : writeFile(Avatar);
      WebApp -> Client : profileid.SQLresponse;
    } else {
      WebApp -> Client : editfail;
    }
  }
  elseif (Client -> WebApp : file.?FilePath & inFS(evil_file)) @id(evil_file) @keys(FilePath = file) {
    WebApp -> FS : readFile(FilePath);
    FS -> WebApp : ?Contents;
    WebApp -> Client : Contents;
  }
}

goal file_leak : [](!(iknowledge(file(*))));
)raw";

const char* multistage_concretization = R"raw({"domain" : "127.0.0.1",
"tag1" : {
"url" : "https://127.0.0.1/index.php",
"method" : "POST",
"mapping" : { "usr" : "username" , "pwd" : "password" },
"params" : { "username":"?" , "password":"?" },
"tables" : {"username":"users.username", "password":"users.password"}},
"tag2" : {
"url" : "https://127.0.0.1/profile.php",
"method" : "POST",
"params" : { "avatar" : "_", "phone" : "?","surname":"?", "name":"?" },
"mapping" : { "avatar" : "avatar" },
"tables" : {"name":"users.name","surname":"users.surname","phone":"users.phone","avatar":"users.avatar"}},
"tag3" : {
"url" : "https://127.0.0.1/profile.php",
"method" : "GET",
"params" : { "id" : "?"},
"mapping" : { "id" ;"id" },
"tables" : {"id":"users.id"}},
"tag4" : {
"url" : "https://127.0.0.1/index.php",
"method" : "GET",
"params" : { "file" : "_" },
"mapping" : { "file" : "file" }},
"dashboard" : "Welcome",
"profileId" : "Welcome",
"files" :{
"evil_file" : "/home/evil_file.txt"}}
)raw";

const char* dvwa_fi_model = R"raw(model dvwa_fi;

agents Client, WebApp, FS;

constants include : public;

entity WebApp {
  if (Client -> WebApp : include.?Page) @keys(Page = page) {
    WebApp -> FS : readFile(Page);
    FS -> WebApp : ?Response;
    if (Response == file(Page)) {
      WebApp -> Client : include.file(Page);
    } else {
      WebApp -> Client : include;
    }
  }
}

goal file_leak : [](!(iknowledge(file(*))));
)raw";

const char* dvwa_fi_concretization = R"raw({"domain" : "127.0.0.1",
"tag1" : {
"url" : "https://127.0.0.1/vulnerabilities/fi/",
"method" : "GET",
"mapping" : { "page" : "page" },
"params" : { "page" : "?" }},
"include" : "Vulnerability: File Inclusion"}
)raw";

const char* dvwa_upload_model = R"raw(model dvwa_upload;

agents Client, WebApp, FS;

constants uploaded : public;

entity WebApp {
  if (Client -> WebApp : uploaded.?File) @keys(File = uploaded) {
    WebApp -> FS : writeFile(File);
    WebApp -> Client : uploaded;
  }
}

goal no_evil_upload : [](!(inFS(evil_file)));
)raw";

const char* dvwa_upload_concretization = R"raw({"domain" : "127.0.0.1",
"tag1" : {
"url" : "https://127.0.0.1/vulnerabilities/upload/",
"method" : "POST",
"mapping" : { "uploaded" : "uploaded" },
"params" : { "uploaded" : "_" }},
"uploaded" : "succesfully uploaded!",
"files" : {
"evil_file" : "payloads/evil_file.php"}}
)raw";

const char* dvwa_sqli_read_model = R"raw(model dvwa_sqli_read;

agents Client, WebApp, DB, FS;

constants userid : public;

entity WebApp {
  if (Client -> WebApp : userid.?IDvalue) @keys(IDvalue = id) {
    WebApp -> DB : query(IDvalue);
    DB -> WebApp : ?SQLresponse;
    WebApp -> Client : userid.SQLresponse;
  }
}

goal file_leak : [](!(iknowledge(file(*))));
)raw";

const char* dvwa_sqli_read_concretization = R"raw({"domain" : "127.0.0.1",
"tag1" : {
"url" : "https://127.0.0.1/vulnerabilities/sqli/",
"method" : "GET",
"mapping" : { "id" : "id" },
"params" : { "id" : "?" },
"tables" : { "id" : "users.id" }},
"userid" : "User ID exists in the database"}
)raw";

}  // namespace

const std::vector<BundledModel>& bundled_models() {

  static const std::vector<BundledModel> models = {

      {"multistage", multistage_model, multistage_concretization},

      {"dvwa-fi", dvwa_fi_model, dvwa_fi_concretization},

      {"dvwa-upload", dvwa_upload_model, dvwa_upload_concretization},

      {"dvwa-sqli-read", dvwa_sqli_read_model, dvwa_sqli_read_concretization},

  };

  return models;

}


const BundledModel* bundled_model(const std::string& name) {

  for (const auto& m : bundled_models()) {

    if (m.name == name) return &m;

  }

  return nullptr;

}


}  // namespace dywa
