package com.bravo.chat;

public class ChatActivity {
    private final KeyExchange exchange = new KeyExchange();

    public String title() {
        return "Cipher.getInstance(\"DES\") is only a string here";
    }
}
