public String create() {
    String token = UUID.randomUUID().toString();
    return token;
}
