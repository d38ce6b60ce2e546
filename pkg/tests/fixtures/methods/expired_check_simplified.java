public boolean isValid() {
    if (!co.isExpired()) {
        return true;}
    return false;
}
