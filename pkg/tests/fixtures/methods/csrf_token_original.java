private String createToken() {
    CsrfToken csrfToken = new CsrfToken();
    String token = csrfToken.create();
    return token;
}
