package com.golf.maps;

final class Overrides {
    static final String ALGORITHM = "Blowfish";

    private Overrides() {
    }
}
