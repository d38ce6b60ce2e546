private String createToken() {
    CsrfToken csrfToken = new CsrfToken();
    return csrfToken.create();
}
